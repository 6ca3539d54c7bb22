//! The batch commands. Each builds a table (and for profiles a plot) from a validated config.

use casimir::algebra::{
    associator, ccr_causality_check, commutator, hermiticity_residual, PairingKind,
    RegularFunctional,
};
use casimir::boundary::{
    casimir_kernel_closed, image_partial_sums, kms_condition_check, positivity_form_with,
    BumpTransformTable,
};
use casimir::fields::{make_bump, Geometry, Point4, TestFunction};
use casimir::kernels::{smear2_with, StateSpec};
use casimir::observables::{reference_formulas, DensitySource, ObservableKind};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Command, PairingName, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{Cell, Plot, Table};

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub plot: Option<Plot>,
    /// Largest entry of the err column.
    pub max_err: f64,
}

fn outcome(table: Table, plot: Option<Plot>) -> Outcome {
    let max_err = table
        .column("err")
        .map(|c| c.into_iter().filter(|v| v.is_finite()).fold(0.0, f64::max))
        .unwrap_or(0.0);
    Outcome {
        table,
        plot,
        max_err,
    }
}

pub fn execute(cmd: Command, cfg: &RunConfig) -> Result<Outcome> {
    match cmd {
        Command::Twopoint => twopoint(cfg),
        Command::WickSquare => wick_square(cfg),
        Command::Stress => stress(cfg),
        Command::KmsCheck => kms_check(cfg),
        Command::Positivity => positivity(cfg),
        Command::Convergence => convergence(cfg),
        Command::AlgebraCheck => algebra_check(cfg),
    }
}

fn slab_d(cfg: &RunConfig, key: &str) -> Result<f64> {
    match cfg.geometry() {
        Geometry::Slab { d } => Ok(d),
        Geometry::HalfSpace => Err(CliError::config(key, "this command needs a slab geometry")),
    }
}

fn twopoint(cfg: &RunConfig) -> Result<Outcome> {
    if cfg.points.is_empty() {
        return Err(CliError::config(
            "points",
            "twopoint needs at least one point pair",
        ));
    }
    let state = cfg.boundary_state()?;
    let k = state.kernel();
    let vals: Vec<_> = cfg
        .points
        .par_iter()
        .map(|p| -> Result<_> {
            let (x, xp) = (Point4::from_array(p.x), Point4::from_array(p.xp));
            let v = k.eval_with_err(&x, &xp, cfg.eps)?;
            let closed = match (state.geometry, state.base) {
                (Geometry::Slab { d }, StateSpec::Vacuum) => {
                    Some(casimir_kernel_closed(&x, &xp, cfg.eps, d)?)
                }
                _ => None,
            };
            Ok((v, closed))
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(&["pair", "eps", "re", "im", "err", "closed_re", "closed_im"]);
    for (i, (v, c)) in vals.into_iter().enumerate() {
        t.push(vec![
            i.into(),
            cfg.eps.into(),
            v.value.re.into(),
            v.value.im.into(),
            v.err.into(),
            c.map(|c| c.re).into(),
            c.map(|c| c.im).into(),
        ]);
    }
    Ok(outcome(t, None))
}

fn reference_d(cfg: &RunConfig) -> f64 {
    match cfg.geometry() {
        Geometry::Slab { d } => d,
        Geometry::HalfSpace => 1.0,
    }
}

fn density_rows(cfg: &RunConfig, kind: ObservableKind) -> Result<Vec<(f64, f64, f64, f64)>> {
    let mut src = DensitySource::new(cfg.geometry(), cfg.state_spec(), kind)
        .with_normalization(cfg.normalization());
    src.series = cfg.series();
    let d = reference_d(cfg);
    cfg.z_samples()
        .par_iter()
        .map(|&z| {
            let (v, e) = src.density(z)?;
            let r = reference_formulas(cfg.geometry(), kind, z, d)?;
            Ok((z, v, e, r))
        })
        .collect()
}

fn wick_square(cfg: &RunConfig) -> Result<Outcome> {
    let rows = density_rows(cfg, ObservableKind::WickSquare)?;
    let mut t = Table::new(&["z", "value", "err", "reference"]);
    for &(z, v, e, r) in &rows {
        t.push(vec![z.into(), v.into(), e.into(), r.into()]);
    }
    let plot = Plot {
        title: "Wick square".into(),
        x_label: "z".into(),
        y_label: "<:phi^2:>".into(),
        log_y: false,
        series: vec![
            (
                "image sum".into(),
                rows.iter().map(|r| (r.0, r.1)).collect(),
            ),
            (
                "closed form".into(),
                rows.iter().map(|r| (r.0, r.3)).collect(),
            ),
        ],
    };
    Ok(outcome(t, Some(plot)))
}

fn stress(cfg: &RunConfig) -> Result<Outcome> {
    let comps = cfg
        .components
        .clone()
        .unwrap_or_else(|| vec![[0, 0], [1, 1], [2, 2], [3, 3]]);
    let mut t = Table::new(&["z", "mu", "nu", "value", "err", "reference"]);
    let mut series = Vec::new();
    for [mu, nu] in comps {
        let rows = density_rows(cfg, ObservableKind::Stress { xi: cfg.xi, mu, nu })?;
        for &(z, v, e, r) in &rows {
            t.push(vec![
                z.into(),
                mu.into(),
                nu.into(),
                v.into(),
                e.into(),
                r.into(),
            ]);
        }
        series.push((
            format!("T{mu}{nu}"),
            rows.iter().map(|r| (r.0, r.1)).collect(),
        ));
    }
    let plot = Plot {
        title: format!("stress tensor, xi = {}", cfg.xi),
        x_label: "z".into(),
        y_label: "<:T_mu nu:>".into(),
        log_y: false,
        series,
    };
    Ok(outcome(t, Some(plot)))
}

fn kms_check(cfg: &RunConfig) -> Result<Outcome> {
    let pairs = cfg.function_pairs()?;
    if pairs.is_empty() {
        return Err(CliError::config(
            "pairs",
            "kms-check needs at least one pair of functions",
        ));
    }
    if !matches!(cfg.state_spec(), StateSpec::Kms { .. }) {
        return Err(CliError::config("state", "kms-check needs a kms state"));
    }
    let state = cfg.boundary_state()?;
    let opts = cfg.smear_options();
    let checks: Vec<_> = pairs
        .par_iter()
        .map(|(f, g)| kms_condition_check(&state, f, g, &opts))
        .collect::<casimir::Result<_>>()?;
    let mut t = Table::new(&[
        "pair",
        "residual_re",
        "residual_im",
        "err",
        "scale",
        "relative",
    ]);
    for (i, c) in checks.iter().enumerate() {
        t.push(vec![
            i.into(),
            c.residual.re.into(),
            c.residual.im.into(),
            c.err.into(),
            c.scale.into(),
            (c.residual.norm() / c.scale).into(),
        ]);
    }
    Ok(outcome(t, None))
}

/// `n` factorized bumps with supports inside the slab (0, d), drawn from a fixed-seed stream.
pub fn random_slab_bumps(seed: u64, n: usize, d: f64) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let rz = d * rng.gen_range(0.08..0.3);
            let margin = 0.02 * d;
            let cz = rng.gen_range(rz + margin..d - rz - margin);
            let radii = [
                rng.gen_range(0.2..0.6),
                rng.gen_range(0.4..0.8),
                rng.gen_range(0.4..0.8),
                rz,
            ];
            let center = Point4::new(
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
                cz,
            );
            make_bump(center, radii, rng.gen_range(0.5..2.0)).expect("radii are positive")
        })
        .collect()
}

fn positivity(cfg: &RunConfig) -> Result<Outcome> {
    let d = slab_d(cfg, "geometry")?;
    let state = cfg.boundary_state()?;
    let fs = if cfg.functions.is_empty() {
        random_slab_bumps(cfg.positivity.seed, cfg.positivity.samples, d)
    } else {
        cfg.test_functions()?
    };
    let bt = BumpTransformTable::default();
    let opts = cfg.smear_options();
    let kernel = state.kernel();
    let rows: Vec<_> = fs
        .par_iter()
        .enumerate()
        .map(|(i, f)| -> casimir::Result<_> {
            let p = positivity_form_with(&bt, &state, f)?;
            let dual = if i < cfg.positivity.duality {
                Some(smear2_with(&kernel, f, f, &opts)?)
            } else {
                None
            };
            Ok((p, dual))
        })
        .collect::<casimir::Result<_>>()?;
    let mut t = Table::new(&["index", "value", "err", "position_value", "position_err"]);
    for (i, (p, dual)) in rows.iter().enumerate() {
        t.push(vec![
            i.into(),
            p.value.into(),
            p.err.into(),
            dual.map(|s| s.value.re).into(),
            dual.map(|s| s.err).into(),
        ]);
    }
    Ok(outcome(t, None))
}

fn convergence(cfg: &RunConfig) -> Result<Outcome> {
    let d = slab_d(cfg, "geometry")?;
    if cfg.state_spec() != StateSpec::Vacuum {
        return Err(CliError::config(
            "state",
            "convergence compares against the vacuum closed form",
        ));
    }
    let state = cfg.boundary_state()?;
    let (x, xp) = match cfg.points.first() {
        Some(p) => (Point4::from_array(p.x), Point4::from_array(p.xp)),
        None => (
            Point4::new(0.3, 0.2, 0.0, 0.3 * d),
            Point4::new(0.0, -0.1, 0.4, 0.55 * d),
        ),
    };
    let sums = image_partial_sums(&state, &x, &xp, cfg.eps, cfg.series.n_max)?;
    let closed = casimir_kernel_closed(&x, &xp, cfg.eps, d)?;
    let mut t = Table::new(&["n", "value", "err", "partial_re", "partial_im"]);
    let mut pts = Vec::new();
    for (n, s) in sums.iter().enumerate() {
        let diff: Complex64 = s - closed;
        // rounding of the partial sum and of the closed form
        let err = 8.0 * f64::EPSILON * (n as f64 + 1.0) * closed.norm().max(s.norm());
        t.push(vec![
            n.into(),
            diff.norm().into(),
            err.into(),
            s.re.into(),
            s.im.into(),
        ]);
        if n > 0 {
            pts.push((n as f64, diff.norm()));
        }
    }
    let plot = Plot {
        title: "image series against closed form".into(),
        x_label: "n".into(),
        y_label: "|S_n - closed|".into(),
        log_y: true,
        series: vec![("vacuum slab".into(), pts)],
    };
    Ok(outcome(t, Some(plot)))
}

fn pairing_kind(cfg: &RunConfig, p: PairingName) -> Result<PairingKind> {
    Ok(match p {
        PairingName::MinkowskiE => PairingKind::MinkowskiE,
        PairingName::HalfSpaceE => PairingKind::HalfSpaceE,
        PairingName::SlabE => PairingKind::SlabE {
            d: slab_d(cfg, "pairings")?,
        },
        PairingName::DeformedH => PairingKind::DeformedH,
    })
}

fn pairing_label(p: PairingKind) -> &'static str {
    match p {
        PairingKind::MinkowskiE => "minkowski_e",
        PairingKind::HalfSpaceE => "half_space_e",
        PairingKind::SlabE { .. } => "slab_e",
        PairingKind::DeformedH => "deformed_h",
    }
}

fn algebra_check(cfg: &RunConfig) -> Result<Outcome> {
    let fs = cfg.test_functions()?;
    let pairs = cfg.function_pairs()?;
    if pairs.is_empty() {
        return Err(CliError::config(
            "pairs",
            "algebra-check needs at least one pair of functions",
        ));
    }
    let kinds: Vec<PairingKind> = match &cfg.pairings {
        Some(p) => p
            .iter()
            .map(|n| pairing_kind(cfg, *n))
            .collect::<Result<_>>()?,
        None => {
            let boundary = match cfg.geometry() {
                Geometry::Slab { d } => PairingKind::SlabE { d },
                Geometry::HalfSpace => PairingKind::HalfSpaceE,
            };
            vec![PairingKind::MinkowskiE, boundary, PairingKind::DeformedH]
        }
    };
    let mut t = Table::new(&["check", "pairing", "pair", "value_re", "value_im", "err"]);
    let gen = RegularFunctional::generator;
    for &kind in &kinds {
        let label = pairing_label(kind);
        for (i, (f, g)) in pairs.iter().enumerate() {
            let r = ccr_causality_check(f, g, kind)?;
            t.push(vec![
                "commutator_scalar".into(),
                label.into(),
                i.into(),
                r.commutator_scalar.re.into(),
                r.commutator_scalar.im.into(),
                r.err.into(),
            ]);
            t.push(vec![
                "ccr_deviation".into(),
                label.into(),
                i.into(),
                r.ccr_deviation.into(),
                0.0.into(),
                r.err.into(),
            ]);
            if let Some(dev) = r.spacelike_deviation {
                t.push(vec![
                    "spacelike_commutator".into(),
                    label.into(),
                    i.into(),
                    dev.into(),
                    0.0.into(),
                    r.err.into(),
                ]);
            }
        }
        if fs.len() >= 3 {
            let a = associator(&gen(&fs[0]), &gen(&fs[1]), &gen(&fs[2]), kind)?;
            t.push(vec![
                "associativity".into(),
                label.into(),
                Cell::Empty,
                a.max_coef().into(),
                0.0.into(),
                a.err.into(),
            ]);
        }
        if fs.len() >= 2 {
            let h = hermiticity_residual(&gen(&fs[0]), &gen(&fs[1]), kind)?;
            t.push(vec![
                "hermiticity".into(),
                label.into(),
                Cell::Empty,
                h.max_coef().into(),
                0.0.into(),
                h.err.into(),
            ]);
        }
    }
    for (i, (f, g)) in pairs.iter().enumerate() {
        let a = commutator(&gen(f), &gen(g), PairingKind::DeformedH)?;
        let b = commutator(&gen(f), &gen(g), PairingKind::MinkowskiE)?;
        let diff = a.scalar() - b.scalar();
        t.push(vec![
            "deformed_vs_minkowski".into(),
            "deformed_h".into(),
            i.into(),
            diff.re.into(),
            diff.im.into(),
            (a.err + b.err).into(),
        ]);
    }
    Ok(outcome(t, None))
}
