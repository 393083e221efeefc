//! Suite orchestration: maps a [`RunConfig`] and suite name onto the
//! checkers in `yb_core`.

use yb_core::adlerchain::{
    check_adler_refactorization, check_adler_transfer_poisson, check_gauge_invariance,
    check_transfer_monodromy, f_bracket, gauge_action, gauge_action_decoy, leaf_algebra_check,
    printed_f_bracket, random_transfer_point, reduced_invariants_check, AdlerMap, LeafCoords,
    LinearPoisson, TransferSubject,
};
use yb_core::sampling::{
    distinct_params, small_rational, small_rational_or_zero, spectral_samples, trial_rng, TrialRng,
    MAX_DRAWS,
};
use yb_core::solitonmap::{
    check_monodromy_invariance, check_poisson_map, check_scramble_invariance,
    random_normalized_point, PoissonSetup, PoissonSubject, ProjectorState, Rank1Map, Rank1State,
    RankKMap, SubspaceState,
};
use yb_core::ybcore::{
    check_lax_refactorization, check_reversible, check_transfer_laws_sampled, check_yb,
    transfer_map, LaxAssignment, LaxMap, Mutated, SiteTuple,
};
use yb_core::{CheckReport, Rational, Scalar};

use crate::config::{bad, ConfigError, MapKind, Mode, RunConfig, Suite};

/// Default float tolerance for identities evaluated directly.
pub const DEFAULT_FLOAT_TOL: f64 = 1e-9;
/// Default tolerance for finite-difference Poisson checks.
pub const DEFAULT_FD_TOL: f64 = 1e-6;

/// The mode a suite runs in when `--mode` is not given.
pub fn default_mode(suite: Suite) -> Mode {
    match suite {
        Suite::Poisson => Mode::Float,
        _ => Mode::Exact,
    }
}

pub fn run_suite(cfg: &RunConfig, suite: Suite) -> Result<CheckReport, ConfigError> {
    match cfg.mode {
        Mode::Exact => run_typed::<Rational>(cfg, suite),
        Mode::Float => run_typed::<f64>(cfg, suite),
    }
}

/// Parameters for `count` sites: the configured list (cyclically) or fresh
/// values distinct up to sign.
fn params<T: Scalar>(rng: &mut TrialRng, count: usize, fixed: &Option<Vec<T>>) -> Vec<T> {
    match fixed {
        Some(l) => (0..count).map(|j| l[j % l.len()].clone()).collect(),
        None => distinct_params(rng, count),
    }
}

fn tuple<V: Clone, T: Scalar>(
    rng: &mut TrialRng,
    count: usize,
    value: &dyn Fn(&mut TrialRng) -> V,
    fixed: &Option<Vec<T>>,
) -> SiteTuple<V, T> {
    let vals: Vec<V> = (0..count).map(|_| value(rng)).collect();
    SiteTuple::from_parts(vals, params(rng, count, fixed)).expect("matching lengths")
}

struct Ctx<'a, T> {
    cfg: &'a RunConfig,
    lambdas: Option<Vec<T>>,
    tol: f64,
}

/// A suite body that works for any Lax map.
trait Visit<T: Scalar> {
    fn visit<M: LaxMap<T>>(
        &self,
        ctx: &Ctx<T>,
        map: &M,
        value: &dyn Fn(&mut TrialRng) -> M::Value,
        expected: Option<LaxAssignment>,
    ) -> CheckReport;
}

fn dispatch<T: Scalar, V: Visit<T>>(ctx: &Ctx<T>, v: V) -> CheckReport {
    let (n, k) = (ctx.cfg.n, ctx.cfg.k);
    let adler = |rng: &mut TrialRng| small_rational::<T>(rng);
    let rank1 = move |rng: &mut TrialRng| Rank1State::<T>::random(rng, n);
    let rankk = move |rng: &mut TrialRng| SubspaceState::<T>::random(rng, n, k);
    let printed = Some(LaxAssignment::Printed);
    match (ctx.cfg.map, ctx.cfg.mutate) {
        (MapKind::Adler, false) => v.visit(ctx, &AdlerMap, &adler, None),
        (MapKind::Adler, true) => v.visit(ctx, &Mutated(AdlerMap), &adler, None),
        (MapKind::SolitonRank1, false) => v.visit(ctx, &Rank1Map, &rank1, printed),
        (MapKind::SolitonRank1, true) => v.visit(ctx, &Mutated(Rank1Map), &rank1, printed),
        (MapKind::SolitonRankk, false) => v.visit(ctx, &RankKMap, &rankk, printed),
        (MapKind::SolitonRankk, true) => v.visit(ctx, &Mutated(RankKMap), &rankk, printed),
    }
}

struct Yb;
impl<T: Scalar> Visit<T> for Yb {
    fn visit<M: LaxMap<T>>(
        &self,
        ctx: &Ctx<T>,
        map: &M,
        value: &dyn Fn(&mut TrialRng) -> M::Value,
        _: Option<LaxAssignment>,
    ) -> CheckReport {
        check_yb(map, ctx.cfg.trials, ctx.cfg.seed, ctx.tol, |rng| {
            tuple(rng, 3, value, &ctx.lambdas)
        })
    }
}

struct Reversibility;
impl<T: Scalar> Visit<T> for Reversibility {
    fn visit<M: LaxMap<T>>(
        &self,
        ctx: &Ctx<T>,
        map: &M,
        value: &dyn Fn(&mut TrialRng) -> M::Value,
        _: Option<LaxAssignment>,
    ) -> CheckReport {
        check_reversible(map, ctx.cfg.trials, ctx.cfg.seed, ctx.tol, |rng| {
            tuple(rng, 2, value, &ctx.lambdas)
        })
    }
}

struct TransferLaws;
impl<T: Scalar> Visit<T> for TransferLaws {
    fn visit<M: LaxMap<T>>(
        &self,
        ctx: &Ctx<T>,
        map: &M,
        value: &dyn Fn(&mut TrialRng) -> M::Value,
        _: Option<LaxAssignment>,
    ) -> CheckReport {
        check_transfer_laws_sampled(map, ctx.cfg.trials, ctx.cfg.seed, ctx.tol, |rng| {
            tuple(rng, ctx.cfg.sites, value, &ctx.lambdas)
        })
    }
}

struct Lax;
impl<T: Scalar> Visit<T> for Lax {
    fn visit<M: LaxMap<T>>(
        &self,
        ctx: &Ctx<T>,
        map: &M,
        value: &dyn Fn(&mut TrialRng) -> M::Value,
        expected: Option<LaxAssignment>,
    ) -> CheckReport {
        let zetas = spectral_samples::<T>(ctx.cfg.zeta_samples.unwrap_or(3));
        check_lax_refactorization(
            map,
            ctx.cfg.trials,
            ctx.cfg.seed,
            &zetas,
            ctx.tol,
            expected,
            |rng| tuple(rng, 2, value, &ctx.lambdas),
        )
    }
}

fn run_typed<T: Scalar>(cfg: &RunConfig, suite: Suite) -> Result<CheckReport, ConfigError> {
    let fd_suite = matches!(suite, Suite::Poisson | Suite::FBracket);
    let tol = match (T::EXACT, cfg.tol) {
        (true, _) => 0.0,
        (false, Some(t)) => t,
        (false, None) if fd_suite => DEFAULT_FD_TOL,
        (false, None) => DEFAULT_FLOAT_TOL,
    };
    let ctx = Ctx {
        cfg,
        lambdas: cfg.lambda_values::<T>()?,
        tol,
    };
    Ok(match suite {
        Suite::Yb => dispatch(&ctx, Yb),
        Suite::Reversibility => dispatch(&ctx, Reversibility),
        Suite::TransferLaws => dispatch(&ctx, TransferLaws),
        Suite::Lax | Suite::Refactorization => {
            if suite == Suite::Refactorization && cfg.map == MapKind::Adler && !cfg.mutate {
                let zetas = spectral_samples::<T>(cfg.zeta_samples.unwrap_or(3));
                check_adler_refactorization(cfg.trials, cfg.seed, &zetas, tol, |rng| {
                    tuple(rng, 2, &|r| small_rational::<T>(r), &ctx.lambdas)
                })
            } else {
                dispatch(&ctx, Lax)
            }
        }
        Suite::Monodromy => monodromy(&ctx),
        Suite::Poisson => poisson(cfg)?,
        Suite::FBracket => f_bracket_suite(&ctx)?,
        Suite::LeafAlgebra => {
            let structure = if cfg.mutate {
                LinearPoisson::decoy()
            } else {
                LinearPoisson::leaf()
            };
            let points: Vec<[T; 4]> = (0..cfg.trials)
                .map(|i| {
                    let mut rng = trial_rng(cfg.seed, i as u64);
                    std::array::from_fn(|_| small_rational_or_zero(&mut rng))
                })
                .collect();
            leaf_algebra_check(&structure, &points)
        }
        Suite::Reduction => reduction(&ctx),
    })
}

/// Random `N`-tuple on which every transfer map is defined, redrawing up to
/// [`MAX_DRAWS`] times.
fn defined_tuple<T: Scalar, M: LaxMap<T>>(
    map: &M,
    rng: &mut TrialRng,
    ctx: &Ctx<T>,
    value: &dyn Fn(&mut TrialRng) -> M::Value,
) -> Option<SiteTuple<M::Value, T>> {
    (0..MAX_DRAWS).find_map(|_| {
        let t = tuple(rng, ctx.cfg.sites, value, &ctx.lambdas);
        (1..=t.len())
            .all(|i| transfer_map(map, i, &t).is_ok())
            .then_some(t)
    })
}

/// Spectrum of the monodromy (and `J` for solitons) under every `T_i`, one
/// random tuple per trial; with `--mutate` the scramble decoy replaces the
/// transfer maps.
fn monodromy<T: Scalar>(ctx: &Ctx<T>) -> CheckReport {
    let cfg = ctx.cfg;
    let n_eff = if cfg.map == MapKind::Adler { 2 } else { cfg.n };
    let zetas = spectral_samples::<T>(cfg.zeta_samples.unwrap_or(n_eff * cfg.sites + 1));
    let mut report = CheckReport::for_scalar::<T>(format!("monodromy N={}", cfg.sites));
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, trial as u64);
        let r = match cfg.map {
            MapKind::Adler => defined_tuple(&AdlerMap, &mut rng, ctx, &|r| small_rational::<T>(r))
                .map(|t| {
                    if cfg.mutate {
                        scrambled_adler(&t, &zetas)
                    } else {
                        check_transfer_monodromy(&t, &zetas, ctx.tol)
                    }
                }),
            MapKind::SolitonRank1 => defined_tuple(&Rank1Map, &mut rng, ctx, &|r| {
                Rank1State::<T>::random(r, cfg.n)
            })
            .map(|t| soliton_monodromy(&Rank1Map, &t, &zetas, ctx)),
            MapKind::SolitonRankk => defined_tuple(&RankKMap, &mut rng, ctx, &|r| {
                SubspaceState::<T>::random(r, cfg.n, cfg.k)
            })
            .map(|t| soliton_monodromy(&RankKMap, &t, &zetas, ctx)),
        };
        match r {
            Some(r) => report.merge(r),
            None => report.skip(),
        }
    }
    report
}

fn soliton_monodromy<T, M>(
    map: &M,
    t: &SiteTuple<M::Value, T>,
    zetas: &[T],
    ctx: &Ctx<T>,
) -> CheckReport
where
    T: Scalar,
    M: LaxMap<T>,
    M::Value: ProjectorState<T>,
{
    if ctx.cfg.mutate {
        check_scramble_invariance(map, t, zetas, ctx.tol)
    } else {
        check_monodromy_invariance(map, t, zetas, ctx.tol)
    }
}

/// Adler version of the scramble decoy: `R_12`, then `x_3 <- x_3 + 1`.
fn scrambled_adler<T: Scalar>(t: &SiteTuple<T, T>, zetas: &[T]) -> CheckReport {
    use yb_core::adlerchain::{chain_invariants, ChainState};
    let mut report = CheckReport::for_scalar::<T>("monodromy decoy [adler]");
    let run = || -> yb_core::Result<T> {
        let before = chain_invariants(&ChainState::from_tuple(t), zetas)?;
        let s = yb_core::solitonmap::scramble(&AdlerMap, t)?;
        let after = chain_invariants(&ChainState::from_tuple(&s), zetas)?;
        let diff: Vec<T> = after
            .iter()
            .zip(&before)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        Ok(T::max_abs(&diff))
    };
    match run() {
        Ok(dev) => {
            report.record(0, &dev, &T::one(), 0.0, || {
                format!("scramble changed the spectrum by {dev}")
            });
        }
        Err(e) => report.record_error(0, e.to_string()),
    }
    report
}

fn poisson(cfg: &RunConfig) -> Result<CheckReport, ConfigError> {
    cfg.require_float("the poisson suite")?;
    if cfg.map != MapKind::SolitonRank1 {
        return bad("the poisson suite applies to --map soliton-rank1");
    }
    let lambdas = match cfg.lambda_values::<f64>()? {
        Some(l) if l.len() == 2 => (l[0], l[1]),
        Some(_) => return bad("the poisson suite takes exactly two lambdas (--N 2)"),
        None => (2.0, 1.0),
    };
    let setup = PoissonSetup {
        n: cfg.n,
        lambdas,
        h: cfg.fd_step,
        tol: cfg.tol.unwrap_or(DEFAULT_FD_TOL),
        level: Default::default(),
    };
    let mut skipped = 0;
    let points: Vec<Vec<f64>> = (0..cfg.trials)
        .filter_map(|i| {
            let p = random_normalized_point(&mut trial_rng(cfg.seed, i as u64), &setup);
            skipped += usize::from(p.is_none());
            p
        })
        .collect();
    let subject = if cfg.mutate {
        PoissonSubject::Decoy
    } else {
        PoissonSubject::Soliton
    };
    let mut r = check_poisson_map(subject, &points, &setup);
    r.skipped += skipped;
    Ok(r)
}

fn f_bracket_suite<T: Scalar>(ctx: &Ctx<T>) -> Result<CheckReport, ConfigError> {
    let cfg = ctx.cfg;
    cfg.require_odd_sites()?;
    let n = cfg.sites;
    let b = f_bracket::<T>(n).map_err(|e| crate::config::ConfigError(e.to_string()))?;
    let j_f = if cfg.mutate {
        printed_f_bracket::<T>(n).expect("odd")
    } else {
        b.j_f.clone()
    };
    let mut report = CheckReport::for_scalar::<T>(format!("f-bracket N={n}"));
    let dev =
        b.m.mul(&j_f)
            .and_then(|x| x.mul(&b.m.transpose()))
            .and_then(|x| x.max_abs_diff(&b.j_g))
            .expect("square matrices");
    report.record(0, &dev, &T::one(), 0.0, || {
        format!("M J_f M^T differs from J_g by {dev}")
    });
    let antisym = j_f.add(&j_f.transpose()).expect("square").max_abs();
    report.record(0, &antisym, &T::one(), 0.0, || {
        "J_f is not antisymmetric".into()
    });

    if !T::EXACT {
        let lambdas: Vec<f64> = match cfg.lambda_values::<f64>()? {
            Some(l) => l,
            None => distinct_params::<f64>(&mut trial_rng(cfg.seed, u64::MAX), n),
        };
        let mut skipped = 0;
        let points: Vec<_> = (0..cfg.trials)
            .filter_map(|i| {
                let p = random_transfer_point(
                    &mut trial_rng(cfg.seed, i as u64),
                    &lambdas,
                    cfg.fd_step,
                );
                skipped += usize::from(p.is_none());
                p
            })
            .collect();
        let subject = if cfg.mutate {
            TransferSubject::Decoy
        } else {
            TransferSubject::Adler
        };
        let mut r = check_adler_transfer_poisson(subject, &points, cfg.fd_step, ctx.tol);
        r.skipped += skipped;
        report.merge(r);
    }
    Ok(report)
}

fn reduction<T: Scalar>(ctx: &Ctx<T>) -> CheckReport {
    let cfg = ctx.cfg;
    let n = cfg.sites;
    let mut report = reduced_invariants_check::<T>(n);
    let mut rng = trial_rng(cfg.seed, 0);
    let coords = LeafCoords::new(
        (0..n).map(|_| small_rational_or_zero(&mut rng)).collect(),
        (0..n).map(|_| small_rational_or_zero(&mut rng)).collect(),
        params(&mut rng, n, &ctx.lambdas),
    )
    .expect("lengths");
    let gauges: Vec<Vec<T>> = (0..cfg.trials)
        .map(|i| {
            let mut r = trial_rng(cfg.seed, i as u64 + 1);
            (0..n).map(|_| small_rational(&mut r)).collect()
        })
        .collect();
    let g = if cfg.mutate {
        check_gauge_invariance(
            &coords,
            &gauges,
            |c, t| Ok(gauge_action_decoy(c, t)),
            "wrong sign",
        )
    } else {
        check_gauge_invariance(&coords, &gauges, gauge_action, "triangular")
    };
    report.merge(g);
    report
}

pub(crate) fn random_tuple<V: Clone, T: Scalar>(
    rng: &mut TrialRng,
    count: usize,
    value: &dyn Fn(&mut TrialRng) -> V,
    fixed: &Option<Vec<T>>,
) -> SiteTuple<V, T> {
    tuple(rng, count, value, fixed)
}
