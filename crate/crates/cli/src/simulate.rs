//! Trajectory simulations: iterated transfer maps and the dressing-chain flow.

use serde_json::{json, Value};
use yb_core::adlerchain::{chain_invariants, hamiltonian, integrate_chain, AdlerMap, ChainState};
use yb_core::sampling::{
    bounded_rational, small_rational, spectral_samples, trial_rng, TrialRng, MAX_DRAWS,
};
use yb_core::solitonmap::{
    spectral_invariants, ProjectorState, Rank1Map, Rank1State, RankKMap, SubspaceState,
};
use yb_core::ybcore::{transfer_map, LaxMap, SiteTuple};
use yb_core::{Rational, Scalar};

use crate::config::{bad, ConfigError, MapKind, Mode, RunConfig};
use crate::output::Table;
use crate::suites::random_tuple;

/// Simulation outcome: JSON report (without `wall_ms`), trajectory table,
/// and whether the run passed.
pub struct SimOutput {
    pub report: Value,
    pub table: Table,
    pub pass: bool,
}

fn max_dev<T: Scalar>(a: &[T], b: &[T]) -> T {
    let d: Vec<T> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x.clone() - y.clone())
        .collect();
    T::max_abs(&d)
}

fn strings<T: Scalar>(xs: &[T]) -> Vec<String> {
    xs.iter().map(Scalar::to_canonical_string).collect()
}

struct TransferRun<T> {
    table: Table,
    drift: T,
    /// Largest initial invariant, for the relative drift.
    scale: T,
    failure: Option<String>,
    steps_done: usize,
}

/// Iterates `T_site` from `t0`, recording state columns and invariants.
fn iterate<T, M>(
    map: &M,
    cfg: &RunConfig,
    t0: SiteTuple<M::Value, T>,
    rebase: &dyn Fn(SiteTuple<M::Value, T>) -> yb_core::Result<SiteTuple<M::Value, T>>,
    state_cols: &dyn Fn(&SiteTuple<M::Value, T>) -> yb_core::Result<(Vec<String>, Vec<T>)>,
    invariants: &dyn Fn(&SiteTuple<M::Value, T>) -> yb_core::Result<Vec<T>>,
) -> TransferRun<T>
where
    T: Scalar,
    M: LaxMap<T>,
{
    let mut run = TransferRun {
        table: Table::default(),
        drift: T::zero(),
        scale: T::zero(),
        failure: None,
        steps_done: 0,
    };
    let mut t = t0;
    let mut inv0: Option<Vec<T>> = None;
    for step in 0..=cfg.steps {
        if step > 0 {
            match transfer_map(map, cfg.site, &t).and_then(rebase) {
                Ok(next) => t = next,
                Err(e) => {
                    run.failure = Some(format!("step {step}: {e}"));
                    break;
                }
            }
        }
        let row = state_cols(&t).and_then(|(names, vals)| Ok((names, vals, invariants(&t)?)));
        let (names, vals, inv) = match row {
            Ok(r) => r,
            Err(e) => {
                run.failure = Some(format!("step {step}: {e}"));
                break;
            }
        };
        if run.table.header.is_empty() {
            run.table.header = std::iter::once("step".to_string())
                .chain(names)
                .chain((0..inv.len()).map(|j| format!("inv{j}")))
                .collect();
        }
        match &inv0 {
            None => {
                run.scale = T::max_abs(&inv);
                inv0 = Some(inv.clone());
            }
            Some(i0) => {
                let d = max_dev(&inv, i0);
                if d > run.drift {
                    run.drift = d;
                }
            }
        }
        let mut cells = vec![step.to_string()];
        cells.extend(strings(&vals));
        cells.extend(strings(&inv));
        run.table.rows.push(cells);
        run.steps_done = step;
    }
    run
}

fn soliton_cols<T: Scalar, S: ProjectorState<T>>(
    t: &SiteTuple<S, T>,
) -> yb_core::Result<(Vec<String>, Vec<T>)> {
    let mut names = Vec::new();
    let mut vals = Vec::new();
    for (i, v) in t.values().enumerate() {
        let p = v.projector()?;
        for a in 0..p.rows() {
            for b in 0..p.cols() {
                names.push(format!("P{}_{}{}", i + 1, a + 1, b + 1));
                vals.push(p[(a, b)].clone());
            }
        }
    }
    Ok((names, vals))
}

fn rebase_sites<T: Scalar, S: ProjectorState<T>>(
    t: SiteTuple<S, T>,
) -> yb_core::Result<SiteTuple<S, T>> {
    let values = t
        .values()
        .map(ProjectorState::rebased)
        .collect::<yb_core::Result<Vec<S>>>()?;
    SiteTuple::from_parts(values, t.params())
}

fn soliton_invariants<T, M>(
    map: &M,
    t: &SiteTuple<M::Value, T>,
    zetas: &[T],
) -> yb_core::Result<Vec<T>>
where
    T: Scalar,
    M: LaxMap<T>,
    M::Value: ProjectorState<T>,
{
    let inv = spectral_invariants(map, t, zetas)?;
    let mut out: Vec<T> = inv.coefficients.into_iter().flatten().collect();
    out.extend(inv.j.data().iter().cloned());
    Ok(out)
}

fn params<T: Scalar>(cfg: &RunConfig) -> Result<Option<Vec<T>>, ConfigError> {
    cfg.lambda_values::<T>()
}

fn transfer_typed<T: Scalar>(cfg: &RunConfig) -> Result<SimOutput, ConfigError> {
    if cfg.mutate {
        return bad("--mutate is not supported by simulate-transfer");
    }
    let lambdas = params::<T>(cfg)?;
    let mut rng: TrialRng = trial_rng(cfg.seed, 0);
    let n = cfg.sites;
    let n_eff = if cfg.map == MapKind::Adler { 2 } else { cfg.n };
    let zetas = spectral_samples::<T>(cfg.zeta_samples.unwrap_or(n_eff * n + 1));
    let run = match cfg.map {
        MapKind::Adler => {
            let t0 = random_tuple(&mut rng, n, &|r| small_rational::<T>(r), &lambdas);
            iterate(
                &AdlerMap,
                cfg,
                t0,
                &Ok,
                &|t| {
                    let vals: Vec<T> = t.values().cloned().collect();
                    Ok(((1..=vals.len()).map(|i| format!("x{i}")).collect(), vals))
                },
                &|t| chain_invariants(&ChainState::from_tuple(t), &zetas),
            )
        }
        MapKind::SolitonRank1 => {
            let t0 = random_tuple(
                &mut rng,
                n,
                &|r| Rank1State::<T>::random(r, cfg.n),
                &lambdas,
            );
            iterate(&Rank1Map, cfg, t0, &rebase_sites, &soliton_cols, &|t| {
                soliton_invariants(&Rank1Map, t, &zetas)
            })
        }
        MapKind::SolitonRankk => {
            let t0 = random_tuple(
                &mut rng,
                n,
                &|r| SubspaceState::<T>::random(r, cfg.n, cfg.k),
                &lambdas,
            );
            iterate(&RankKMap, cfg, t0, &rebase_sites, &soliton_cols, &|t| {
                soliton_invariants(&RankKMap, t, &zetas)
            })
        }
    };
    let exact_zero = run.drift.is_zero();
    let mut failures: Vec<Value> = Vec::new();
    if let Some(f) = &run.failure {
        failures.push(json!({ "trial": run.steps_done + 1, "detail": f }));
    }
    if T::EXACT && !exact_zero {
        failures.push(json!({
            "trial": 0,
            "detail": format!("invariant drift {} in exact mode", run.drift),
        }));
    }
    let pass = failures.is_empty();
    let report = json!({
        "suite": "simulate-transfer",
        "config": cfg,
        "steps": run.steps_done,
        "max_drift": run.drift.to_f64(),
        "max_relative_drift": if run.scale.is_zero() {
            run.drift.to_f64()
        } else {
            (run.drift.clone() / run.scale.clone()).to_f64()
        },
        "exact": if T::EXACT { Some(exact_zero) } else { None },
        "failures": failures,
        "verdict": if pass { "pass" } else { "fail" },
    });
    Ok(SimOutput {
        report,
        table: run.table,
        pass,
    })
}

pub fn simulate_transfer(cfg: &RunConfig) -> Result<SimOutput, ConfigError> {
    match cfg.mode {
        Mode::Exact => transfer_typed::<Rational>(cfg),
        Mode::Float => transfer_typed::<f64>(cfg),
    }
}

/// Configured chain data, or small random rationals. Random data is redrawn
/// (up to [`MAX_DRAWS`] times) while the flow reaches a pole before
/// `t_end`: solutions of the dressing chain are meromorphic and blow up in
/// finite time for many initial values.
fn initial_chain(cfg: &RunConfig) -> Result<(ChainState<f64>, usize), ConfigError> {
    let n = cfg.sites;
    let (fixed_l, fixed_f) = (cfg.lambda_values::<f64>()?, cfg.f0_values::<f64>()?);
    let mut rng = trial_rng(cfg.seed, 0);
    let mut last = None;
    for draw in 0..MAX_DRAWS {
        let lambda = fixed_l
            .clone()
            .unwrap_or_else(|| (0..n).map(|_| bounded_rational(&mut rng, 4, 4)).collect());
        let f = fixed_f
            .clone()
            .unwrap_or_else(|| (0..n).map(|_| bounded_rational(&mut rng, 2, 4)).collect());
        let s = ChainState::new(f, lambda).map_err(|e| ConfigError(e.to_string()))?;
        let random = fixed_l.is_none() || fixed_f.is_none();
        if !random || integrate_chain(&s, cfg.dt, cfg.t_end, &[]).is_ok() {
            return Ok((s, draw));
        }
        last = Some(s);
    }
    // Every draw blew up; run the last one and let the report say so.
    Ok((last.expect("MAX_DRAWS > 0"), MAX_DRAWS))
}

/// RK4 run of the dressing chain at `dt` (recorded) and `dt/2` (for the
/// convergence-order ratio of the `H` drift).
pub fn simulate_chain(cfg: &RunConfig) -> Result<SimOutput, ConfigError> {
    cfg.require_float("simulate-chain")?;
    cfg.require_odd_sites()?;
    if cfg.mutate {
        return bad("--mutate is not supported by simulate-chain");
    }
    let n = cfg.sites;
    let (s, redraws) = initial_chain(cfg)?;
    let zetas = spectral_samples::<f64>(cfg.zeta_samples.unwrap_or(3));

    let mut failures: Vec<Value> = Vec::new();
    let mut table = Table::default();
    let (mut h_drift, mut inv_drift, mut ratio) = (None, None, None);
    match integrate_chain(&s, cfg.dt, cfg.t_end, &zetas) {
        Ok(tr) => {
            table.header = std::iter::once("t".to_string())
                .chain((1..=n).map(|i| format!("f{i}")))
                .chain(std::iter::once("H".to_string()))
                .chain((0..zetas.len()).flat_map(|z| (0..3).map(move |c| format!("c{z}_{c}"))))
                .collect();
            for k in 0..tr.times.len() {
                let mut row = vec![tr.times[k].to_canonical_string()];
                row.extend(strings(&tr.states[k]));
                row.push(tr.hamiltonian[k].to_canonical_string());
                row.extend(strings(&tr.invariants[k]));
                table.rows.push(row);
            }
            h_drift = Some(tr.h_drift);
            inv_drift = Some(tr.invariant_drift);
            if let Ok(half) = integrate_chain(&s, cfg.dt / 2.0, cfg.t_end, &[]) {
                if half.h_drift > 0.0 {
                    ratio = Some(tr.h_drift / half.h_drift);
                }
            }
        }
        Err(e) => failures.push(json!({ "trial": 0, "detail": e.to_string() })),
    }
    let pass = failures.is_empty();
    let report = json!({
        "suite": "simulate-chain",
        "config": cfg,
        "steps": table.rows.len().saturating_sub(1),
        "h_initial": hamiltonian(&s),
        "redraws": redraws,
        "h_drift": h_drift,
        "invariant_drift": inv_drift,
        "order_ratio": ratio,
        "failures": failures,
        "verdict": if pass { "pass" } else { "fail" },
    });
    Ok(SimOutput {
        report,
        table,
        pass,
    })
}
