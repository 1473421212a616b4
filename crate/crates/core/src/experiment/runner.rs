use std::fmt;
use std::time::{SystemTime, UNIX_EPOCH};

use rand::Rng;

use super::config::{
    validate, EraserConfig, ExperimentConfig, ExperimentKind, SweepConfig, Violation, WeakConfig,
};
use super::random::{random_eraser_scenario, random_state, random_weak_scenario, seeded};
use super::table::{ResultTable, TableRow, TIMESTAMP_KEY};
use crate::eraser::{EraserScenario, Stage};
use crate::error::Error;
use crate::operator::{CouplingSpec, Observable};
use crate::probe::{
    simulate_pointer, theta2_profile, worked_example_theta2, GaussianProbe, WeakScenario,
};
use crate::state::{pancharatnam_phase, solid_angle, wrap_phase, PureState};

#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Config(Vec<Violation>),
    Domain { context: String, source: Error },
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(v) => {
                let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
                write!(f, "invalid configuration: {}", parts.join("; "))
            }
            RunError::Domain { context, source } => write!(f, "{context}: {source}"),
        }
    }
}

impl std::error::Error for RunError {}

fn domain(context: impl Into<String>) -> impl FnOnce(Error) -> RunError {
    let context = context.into();
    move |source| RunError::Domain { context, source }
}

/// Validates and runs one experiment. `kind` overrides (and must agree with)
/// the kind declared in the document.
pub fn run(config: &ExperimentConfig, kind: Option<ExperimentKind>) -> Result<ResultTable, RunError> {
    let violations = validate(config, kind);
    if !violations.is_empty() {
        return Err(RunError::Config(violations));
    }
    let kind = kind.or(config.kind).expect("validated");
    let config = ExperimentConfig {
        kind: Some(kind),
        ..config.clone()
    }
    .with_defaults();

    let mut table = match kind {
        ExperimentKind::Eraser => run_eraser(config.eraser.as_ref().expect("validated"), config.seed)?,
        ExperimentKind::Weak => run_weak(config.weak.as_ref().expect("validated"), config.seed)?,
        ExperimentKind::Theta2Sweep => {
            run_theta2_sweep(config.theta2_sweep.as_ref().expect("validated"))?
        }
        ExperimentKind::Eq14Check => {
            run_eq14_check(config.eq14_check.as_ref().expect("validated").triples, config.seed)
        }
    };

    let mut metadata = vec![
        ("generator".to_string(), "geophase".to_string()),
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("kind".to_string(), kind.name().to_string()),
        ("seed".to_string(), config.seed.to_string()),
        (TIMESTAMP_KEY.to_string(), unix_now().to_string()),
        ("config".to_string(), config.to_toml_string().trim_end().to_string()),
    ];
    metadata.append(&mut table.metadata);
    table.metadata = metadata;
    Ok(table)
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub const ERASER_COLUMNS: [&str; 13] = [
    "scenario",
    "delta_i",
    "delta_m",
    "delta_f",
    "delta1",
    "delta2",
    "delta_i_scan",
    "delta_m_scan",
    "delta_f_scan",
    "visibility_initial",
    "visibility_labelled",
    "visibility_post",
    "success_probability",
];

fn eraser_row(index: usize, s: &EraserScenario, n_grid: usize) -> crate::Result<Vec<f64>> {
    Ok(vec![
        index as f64,
        s.constructive_phase_analytic(Stage::Initial)?,
        s.constructive_phase_analytic(Stage::Labelled)?,
        s.constructive_phase_analytic(Stage::PostSelected)?,
        s.labelling_shift()?,
        s.eraser_shift()?,
        s.constructive_phase_scan(Stage::Initial, n_grid)?,
        s.constructive_phase_scan(Stage::Labelled, n_grid)?,
        s.constructive_phase_scan(Stage::PostSelected, n_grid)?,
        s.visibility(Stage::Initial)?,
        s.visibility(Stage::Labelled)?,
        s.visibility(Stage::PostSelected)?,
        s.post_selection_probability()?,
    ])
}

fn run_eraser(cfg: &EraserConfig, seed: u64) -> Result<ResultTable, RunError> {
    let mut scenarios = Vec::with_capacity(cfg.scenarios.len() + cfg.random);
    for (i, case) in cfg.scenarios.iter().enumerate() {
        let ctx = || format!("eraser.scenarios[{i}]");
        let f = case
            .psi_f
            .as_ref()
            .map(|f| f.to_state())
            .transpose()
            .map_err(domain(ctx()))?;
        scenarios.push(EraserScenario::new(
            case.path().map_err(domain(ctx()))?,
            case.psi_i.to_state().map_err(domain(ctx()))?,
            case.psi_m1.to_state().map_err(domain(ctx()))?,
            case.psi_m2.to_state().map_err(domain(ctx()))?,
            f,
        ));
    }
    let mut rng = seeded(seed);
    scenarios.extend((0..cfg.random).map(|_| random_eraser_scenario(&mut rng)));

    let mut table = ResultTable::new(ERASER_COLUMNS);
    for (i, s) in scenarios.iter().enumerate() {
        let row = match eraser_row(i, s, cfg.n_grid) {
            Ok(values) => TableRow::ok(values),
            Err(e) => {
                let mut row = TableRow::flagged(ERASER_COLUMNS.len(), e.code());
                row.values[0] = i as f64;
                row
            }
        };
        table.push(row);
    }
    Ok(table)
}

pub const WEAK_COLUMNS: [&str; 14] = [
    "scenario",
    "g",
    "hbar",
    "delta_p",
    "re_weak_value",
    "im_weak_value",
    "dx_simulated",
    "dx_analytic",
    "dx1",
    "dx2",
    "deviation",
    "success_probability",
    "overlap_probability",
    "weakness_ratio",
];

fn explicit_weak_states(cfg: &WeakConfig) -> crate::Result<(PureState, PureState, Observable)> {
    if let Some(theta) = cfg.theta {
        return Ok((
            PureState::plus(),
            crate::probe::worked_example_post_selection(theta)?,
            Observable::sigma_x(),
        ));
    }
    let psi_i = cfg.psi_i.as_ref().expect("validated").to_state()?;
    let psi_f = cfg.psi_f.as_ref().expect("validated").to_state()?;
    let obs = cfg
        .observable
        .as_ref()
        .expect("validated")
        .to_observable()
        .expect("validated");
    Ok((psi_i, psi_f, obs))
}

fn run_weak(cfg: &WeakConfig, seed: u64) -> Result<ResultTable, RunError> {
    let mut scenarios = Vec::new();
    if cfg.has_explicit_scenario() {
        let (psi_i, psi_f, obs) = explicit_weak_states(cfg).map_err(domain("weak"))?;
        for &g in &cfg.couplings {
            for &dp in &cfg.delta_ps {
                let ctx = format!("weak scenario (G = {g}, delta_p = {dp}, hbar = {})", cfg.hbar);
                let coupling = CouplingSpec::new(g, cfg.hbar).map_err(domain(ctx.clone()))?;
                let probe = GaussianProbe::with_grid(dp, cfg.p_center, cfg.grid_points, cfg.half_width)
                    .map_err(domain(ctx.clone()))?;
                scenarios.push(WeakScenario::new(psi_i, psi_f, obs, coupling, probe).map_err(domain(ctx))?);
            }
        }
    }
    let mut rng = seeded(seed);
    for k in 0..cfg.random {
        let ratio = rng.random_range(0.05 * cfg.max_ratio..=cfg.max_ratio);
        let s = random_weak_scenario(&mut rng, ratio)
            .map_err(domain(format!("random weak scenario {k} (ratio = {ratio})")))?;
        scenarios.push(s);
    }

    let mut table = ResultTable::new(WEAK_COLUMNS);
    for (i, s) in scenarios.iter().enumerate() {
        let r = simulate_pointer(s).map_err(domain(format!(
            "weak scenario {i} (G = {}, delta_p = {}, hbar = {}, grid = {})",
            s.coupling.g(),
            s.probe.delta_p(),
            s.coupling.hbar(),
            s.probe.len()
        )))?;
        let w = s.weak_value();
        let overlap = crate::state::inner_product(&s.psi_f, &s.psi_i).norm_sqr();
        table.push(TableRow::ok(vec![
            i as f64,
            s.coupling.g(),
            s.coupling.hbar(),
            s.probe.delta_p(),
            w.re,
            w.im,
            r.dx_simulated,
            r.dx_analytic,
            r.dx1,
            r.dx2,
            r.dx_simulated - r.dx_analytic,
            r.success_probability,
            overlap,
            r.weakness_ratio,
        ]));
    }
    Ok(table)
}

pub const SWEEP_COLUMNS: [&str; 5] = ["theta", "p", "phi", "theta2", "theta2_closed_form"];

fn run_theta2_sweep(cfg: &SweepConfig) -> Result<ResultTable, RunError> {
    let momenta = cfg.momenta();
    let coupling = CouplingSpec::new(cfg.g, cfg.hbar).map_err(domain("theta2_sweep"))?;
    // The profile never touches the probe; any valid one will do.
    let probe = GaussianProbe::with_grid(1.0, 0.0, 3, 6.0).map_err(domain("theta2_sweep"))?;
    let mut table = ResultTable::new(SWEEP_COLUMNS);
    for &theta in &cfg.thetas {
        let s = WeakScenario::worked_example(theta, coupling, probe.clone())
            .map_err(domain(format!("theta2_sweep theta = {theta}")))?;
        for (p, phase) in theta2_profile(&s, &momenta) {
            let phi = coupling.phase_angle(p);
            let row = match phase {
                Ok(v) => TableRow::ok(vec![theta, p, phi, v, worked_example_theta2(theta, phi)]),
                Err(e) => {
                    let mut row = TableRow::flagged(SWEEP_COLUMNS.len(), e.code());
                    row.values[..3].copy_from_slice(&[theta, p, phi]);
                    row
                }
            };
            table.push(row);
        }
    }
    Ok(table)
}

pub const EQ14_COLUMNS: [&str; 4] = ["triple", "pancharatnam_phase", "solid_angle", "deviation"];

/// `|phase + Omega/2|` measured on the circle for `n` seeded Haar-random
/// triples.
fn run_eq14_check(n: usize, seed: u64) -> ResultTable {
    let mut rng = seeded(seed);
    let mut table = ResultTable::new(EQ14_COLUMNS);
    for k in 0..n {
        let [a, b, c] = [random_state(&mut rng), random_state(&mut rng), random_state(&mut rng)];
        let row = match (pancharatnam_phase(&a, &b, &c), solid_angle(&a, &b, &c)) {
            (Ok(phase), Ok(omega)) => TableRow::ok(vec![
                k as f64,
                phase,
                omega,
                wrap_phase(phase + 0.5 * omega).abs(),
            ]),
            (Err(e), _) | (_, Err(e)) => {
                let mut row = TableRow::flagged(EQ14_COLUMNS.len(), e.code());
                row.values[0] = k as f64;
                row
            }
        };
        table.push(row);
    }
    table
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

/// Human-readable digest of a result table.
pub fn summarize(kind: ExperimentKind, table: &ResultTable) -> String {
    let total = table.rows.len();
    let ok = table.rows.iter().filter(|r| r.is_ok()).count();
    let mut out = format!("{kind}: {total} rows ({ok} ok, {} flagged)\n", total - ok);
    let col = |name: &str| table.column(name).unwrap_or_default();
    match kind {
        ExperimentKind::Eq14Check => {
            out += &format!(
                "max |pancharatnam_phase + solid_angle/2| = {:.3e}\n",
                max_of(col("deviation"))
            );
        }
        ExperimentKind::Weak => {
            let dev = col("deviation");
            let an = col("dx_analytic");
            let rel = dev.iter().zip(&an).filter(|(_, a)| **a != 0.0).map(|(d, a)| (d / a).abs());
            out += &format!("max |dx_simulated - dx_analytic| = {:.3e}\n", max_of(dev.iter().map(|d| d.abs())));
            out += &format!("max relative deviation = {:.3e}\n", max_of(rel));
            out += &format!("max weakness ratio = {:.3e}\n", max_of(col("weakness_ratio")));
        }
        ExperimentKind::Eraser => {
            let mut worst = 0.0f64;
            for (a, s) in [("delta_i", "delta_i_scan"), ("delta_m", "delta_m_scan"), ("delta_f", "delta_f_scan")] {
                for (x, y) in col(a).into_iter().zip(col(s)) {
                    worst = worst.max(crate::state::phase_distance(x, y));
                }
            }
            out += &format!("max |scan - analytic| constructive phase = {worst:.3e}\n");
        }
        ExperimentKind::Theta2Sweep => {
            let (thetas, ps, phases) = (col("theta"), col("p"), col("theta2"));
            let mut seen: Vec<f64> = Vec::new();
            for &t in &thetas {
                if seen.contains(&t) {
                    continue;
                }
                seen.push(t);
                let series: Vec<(f64, f64)> = thetas
                    .iter()
                    .zip(ps.iter().zip(&phases))
                    .filter(|(tt, _)| **tt == t)
                    .map(|(_, (p, v))| (*p, *v))
                    .collect();
                let hi = series.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
                let lo = series.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
                out += &format!("theta = {t:.6}: {} samples, phase range = {:.6}\n", series.len(), hi - lo);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn parse(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml_str(text).unwrap()
    }

    #[test]
    fn config_errors_surface_as_config() {
        let cfg = parse("kind = \"weak\"\n[weak]\ntheta = 0.5\ncouplings = [0.1]\ndelta_ps = [0.1]\ngrid_points = 300\n");
        match run(&cfg, None) {
            Err(RunError::Config(v)) => assert_eq!(v[0].field, "weak.grid_points"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn coarse_grid_is_a_domain_error() {
        let cfg = parse("kind = \"weak\"\n[weak]\ntheta = 0.3\ncouplings = [20.0]\ndelta_ps = [1.0]\ngrid_points = 256\n");
        match run(&cfg, None) {
            Err(RunError::Domain { context, source }) => {
                assert!(context.contains("G = 20"));
                assert_eq!(source.code(), "grid_too_coarse");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn eraser_without_post_selection_is_flagged() {
        let cfg = parse(
            r#"
kind = "eraser"
[[eraser.scenarios]]
c1 = [1.0, 0.0]
c2 = [1.0, 0.0]
psi_i = { polar = 0.0, azimuth = 0.0 }
psi_m1 = { polar = 0.5, azimuth = 0.0 }
psi_m2 = { polar = 1.0, azimuth = 1.0 }
"#,
        );
        let t = run(&cfg, None).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0].status, "missing_post_selection");
    }

    #[test]
    fn sweep_hits_quarter_pi() {
        let cfg = parse(&format!(
            "kind = \"theta2_sweep\"\n[theta2_sweep]\nthetas = [{FRAC_PI_4:?}]\np_values = [0.0, {FRAC_PI_4:?}, {FRAC_PI_2:?}]\n"
        ));
        let t = run(&cfg, None).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert!((t.rows[1].values[3] + FRAC_PI_4).abs() < 1e-15);
        assert_eq!(t.rows[2].status, "degenerate_bracket");
        assert_eq!(t.rows[2].values[1], FRAC_PI_2);
    }
}
