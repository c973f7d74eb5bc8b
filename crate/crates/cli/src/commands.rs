use rayon::prelude::*;

use phasebridge::channels::{adequate_out_cutoff, attenuator_apply, qla_apply, AmplifierParams, AttenuatorParams};
use phasebridge::experiments::{
    figure1a_run, figure1b_run, nonlinear_amplification_scan, property_suite, ratio_r, table1_run, FIG1B_S_PLUS_1,
    TABLE1_EPS, TABLE1_S,
};
use phasebridge::fock::{phase_angle, PreparedState, StateSpec};
use phasebridge::phase::{
    paul_distribution, pb_continuous_distribution, pb_discrete_distribution, AmplifiedPbKernel, PhaseDistribution,
    PhaseGrid, QuadratureConfig,
};
use phasebridge::{CMatrix, Warning};

use crate::{Command, Failure, Outcome, Records, StateArgs};

/// Photon-number mass dropped by a channel before the output is accepted.
const CHANNEL_TAIL_TOL: f64 = 1e-12;
/// Number of `s` values in the nonlinear scan whose numerical cross-check is run.
const NONLINEAR_NUMERIC_MAX_S: usize = 400;
const NONLINEAR_S: [usize; 3] = [100, 200, 400];

type CmdResult = Result<Outcome, Failure>;

fn ok(records: Records) -> CmdResult {
    Ok(Outcome {
        records,
        validation_failed: false,
    })
}

fn header(command: &str, columns: &[&'static str]) -> Records {
    let mut r = Records::new(columns);
    r.meta("tool", concat!("phasebridge ", env!("CARGO_PKG_VERSION")));
    r.meta("command", command);
    r
}

struct Loaded {
    cutoff: usize,
    state: PreparedState,
}

fn load(args: &StateArgs, records: &mut Records) -> Result<Loaded, Failure> {
    let cutoff = args.cutoff.unwrap_or_else(|| args.state.default_cutoff());
    let state = args.state.build(cutoff)?;
    records.meta("state", args.state.to_string());
    records.meta("cutoff", cutoff);
    let deficit = state.density.trace_deficit();
    records.meta("trace_deficit", deficit);
    if deficit > Warning::TAIL_MASS_LIMIT {
        records.warn(Warning::TailMass(deficit));
    }
    Ok(Loaded {
        cutoff,
        state,
    })
}

fn distribution_rows(records: &mut Records, dist: &PhaseDistribution) {
    records.meta("quad_error", dist.quad_error);
    if let Some(w) = dist.warning() {
        records.warn(w);
    }
    for (phi, p) in dist.rows() {
        records.push(vec![phi.into(), p.into()]);
    }
}

fn matrix_rows(records: &mut Records, m: &CMatrix) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m[(i, j)];
            if v.re != 0.0 || v.im != 0.0 {
                records.push(vec![i.into(), j.into(), v.re.into(), v.im.into()]);
            }
        }
    }
}

pub fn execute(cmd: &Command) -> CmdResult {
    match cmd {
        Command::Paul { state, grid } => {
            let mut r = header("paul", &["phi", "density"]);
            let l = load(state, &mut r)?;
            let cfg = QuadratureConfig::for_state(&l.state.density).with_grid(*grid);
            cfg.validate()?;
            r.meta("grid", *grid);
            r.meta("radial_nodes", cfg.radial_nodes);
            r.meta("r_max", cfg.r_max);
            let dist = paul_distribution(&l.state.density, &cfg)?;
            distribution_rows(&mut r, &dist);
            ok(r)
        }
        Command::Pb { state, s, grid } => {
            let mut r = header("pb", &["phi", "density"]);
            let l = load(state, &mut r)?;
            let s = s.unwrap_or(l.cutoff);
            r.meta("s", s);
            r.meta("grid", *grid);
            let dist = pb_continuous_distribution(&l.state.density, s, PhaseGrid::new(*grid)?);
            distribution_rows(&mut r, &dist);
            ok(r)
        }
        Command::PbDiscrete { state, s } => {
            let mut r = header("pb-discrete", &["t", "theta", "probability"]);
            let l = load(state, &mut r)?;
            let s = s.unwrap_or(l.cutoff);
            r.meta("s", s);
            let p = pb_discrete_distribution(&l.state.density, s)?;
            r.meta("total", p.iter().sum::<f64>());
            for (t, v) in p.into_iter().enumerate() {
                r.push(vec![t.into(), phase_angle(t, s).into(), v.into()]);
            }
            ok(r)
        }
        Command::AmplifiedPb { state, s, eps, grid } => {
            let mut r = header("amplified-pb", &["phi", "density"]);
            let l = load(state, &mut r)?;
            let params = AmplifierParams::linear(*s, *eps)?;
            r.meta("s", *s);
            r.meta("eps", *eps);
            r.meta("kappa", params.kappa());
            r.meta("grid", *grid);
            let g = PhaseGrid::new(*grid)?;
            let kernel = AmplifiedPbKernel::new(*s, &params, l.cutoff)?;
            let rho = &l.state.density;
            let density = (0..g.size())
                .into_par_iter()
                .map(|i| {
                    let phi = g.point(i);
                    match &l.state.pure {
                        Some(v) => kernel.density(v, phi),
                        None => kernel.density_mixed(rho, phi),
                    }
                })
                .collect::<phasebridge::Result<Vec<f64>>>()?;
            for (phi, p) in g.points().zip(density) {
                r.push(vec![phi.into(), p.into()]);
            }
            ok(r)
        }
        Command::Amplify { state, kappa } => {
            let mut r = header("amplify", &["m", "n", "re", "im"]);
            let l = load(state, &mut r)?;
            let params = AmplifierParams::new(*kappa)?;
            let out_cutoff = adequate_out_cutoff(&l.state.density, *kappa, CHANNEL_TAIL_TOL);
            r.meta("kappa", *kappa);
            r.meta("out_cutoff", out_cutoff);
            let out = qla_apply(&l.state.density, &params, out_cutoff)?;
            r.meta("discarded_mass", out.discarded_mass);
            r.meta("trace", out.state.trace());
            if let Some(w) = out.warning() {
                r.warn(w);
            }
            matrix_rows(&mut r, out.state.entries());
            ok(r)
        }
        Command::Attenuate { state, lambda } => {
            let mut r = header("attenuate", &["m", "n", "re", "im"]);
            let l = load(state, &mut r)?;
            let params = AttenuatorParams::new(*lambda)?;
            r.meta("lambda", *lambda);
            let out = attenuator_apply(l.state.density.entries(), &params, l.cutoff)?;
            matrix_rows(&mut r, &out);
            ok(r)
        }
        Command::Ratio { state, s, eps, phi } => {
            let mut r = header("ratio", &["s", "eps", "phi", "ratio"]);
            let l = load(state, &mut r)?;
            r.meta("s", *s);
            r.meta("eps", *eps);
            r.meta("phi", *phi);
            let ratio = ratio_r(&l.state.density, *s, *eps, *phi)?;
            r.push(vec![(*s).into(), (*eps).into(), (*phi).into(), ratio.into()]);
            ok(r)
        }
        Command::Table1 { samples, seed, phi, s, eps } => {
            let mut r = header("table1", &["s", "eps", "phi", "mean", "max_dev", "n_samples", "seed"]);
            let s_list: Vec<usize> = s.map_or(TABLE1_S.to_vec(), |v| vec![v]);
            let eps_list: Vec<f64> = eps.map_or(TABLE1_EPS.to_vec(), |v| vec![v]);
            r.meta("samples", *samples);
            r.meta("seed", *seed);
            r.meta("phi", *phi);
            r.meta("s_list", join(&s_list, |v| v.to_string()));
            r.meta("eps_list", join(&eps_list, |v| crate::format_float(*v)));
            r.meta("ensemble", "hilbert-schmidt qubits");
            let rep = table1_run(*samples, *seed, *phi, &s_list, &eps_list)?;
            for e in rep.entries {
                r.push(vec![
                    e.s.into(),
                    e.eps.into(),
                    e.phi.into(),
                    e.mean.into(),
                    e.max_dev.into(),
                    e.n_samples.into(),
                    e.seed.into(),
                ]);
            }
            ok(r)
        }
        Command::Fig1a { grid, terms } => {
            let mut r = header("fig1a", &["r_prime", "phi", "paul", "pb"]);
            r.meta("r_prime_list", "0.5;2");
            r.meta("psi", std::f64::consts::PI);
            r.meta("grid", *grid);
            r.meta("terms", *terms);
            for row in figure1a_run(&[0.5, 2.0], std::f64::consts::PI, PhaseGrid::new(*grid)?, *terms)? {
                r.push(vec![row.r_prime.into(), row.phi.into(), row.paul.into(), row.pb.into()]);
            }
            ok(r)
        }
        Command::Fig1b { eps, terms } => {
            let mut r = header("fig1b", &["s_plus_1", "t", "phi", "ratio"]);
            r.meta("r_prime", 2.0);
            r.meta("psi", std::f64::consts::PI);
            r.meta("eps", *eps);
            r.meta("terms", *terms);
            r.meta("s_plus_1_list", join(&FIG1B_S_PLUS_1, |v| v.to_string()));
            let t: Vec<usize> = (1..=9).collect();
            for row in figure1b_run(2.0, std::f64::consts::PI, *eps, &FIG1B_S_PLUS_1, &t, *terms)? {
                r.push(vec![row.s_plus_1.into(), row.t.into(), row.phi.into(), row.ratio.into()]);
            }
            ok(r)
        }
        Command::Nonlinear { state, eps, s } => {
            let mut r = header("nonlinear", &["s", "kappa", "closed_form", "numeric"]);
            let StateSpec::Thermal { beta } = *state else {
                return Err(Failure::Usage(format!("nonlinear needs a thermal state, got `{state}`")));
            };
            let s_list: Vec<usize> = s.map_or(NONLINEAR_S.to_vec(), |v| vec![v]);
            r.meta("state", state.to_string());
            r.meta("eps", *eps);
            r.meta("schedule", "kappa = 1 + s^2 eps");
            r.meta("s_list", join(&s_list, |v| v.to_string()));
            r.meta("numeric_max_s", NONLINEAR_NUMERIC_MAX_S);
            for row in nonlinear_amplification_scan(beta, *eps, &s_list, NONLINEAR_NUMERIC_MAX_S)? {
                r.push(vec![row.s.into(), row.kappa.into(), row.closed_form.into(), row.numeric.into()]);
            }
            ok(r)
        }
        Command::Checks => {
            let mut r = header("checks", &["name", "passed", "detail"]);
            let results = property_suite();
            let failed = results.iter().filter(|c| !c.passed).count();
            r.meta("checks", results.len());
            r.meta("failed", failed);
            for c in results {
                r.push(vec![c.name.into(), c.passed.into(), c.detail.into()]);
            }
            Ok(Outcome {
                records: r,
                validation_failed: failed > 0,
            })
        }
    }
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(";")
}
