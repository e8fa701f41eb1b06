//! Seeded property sweeps. Each suite draws instances from per-index RNG
//! streams, evaluates one or more checks on every instance and keeps the
//! worst instance of each check so it can be replayed.

use std::fmt;

use rcc_core::channel::{commutator_criterion, inert_operation, Channel, KrausOperation};
use rcc_core::coherence::{is_incoherent_quantum, l1_coherence, CLASSIFY_TOL};
use rcc_core::linalg::{random_pure_state, ComplexMatrix, SeededRng};
use rcc_core::numfmt::serialize_f64;
use rcc_core::rcc::{
    average_rcc, factorization_check, find_creating_operation, post_operation_mixed,
    post_operation_pure, unselected_state_a, CREATION_THRESHOLD,
};
use rcc_core::sampling::{
    random_bipartite_density, random_bipartite_state, random_ensemble, random_incoherent_quantum,
    random_kraus_operation, random_tp_channel, random_zero_coherence_state,
};
use rcc_core::state::{reduced_a, BipartiteDensity, BipartitePureState};
use serde::Serialize;

use crate::error::Result;
use crate::parallel::{map_indexed, sub_seed};

pub const FORWARD_TOL: f64 = 1e-8;
pub const BAND_LOW: f64 = 1e-9;
pub const BAND_HIGH: f64 = 1e-6;
pub const MAX_EXCLUDED_FRACTION: f64 = 0.01;
pub const BOUND_TOL: f64 = 1e-10;
pub const FACTORIZATION_TOL: f64 = 1e-9;
pub const NOSIGNAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Incoherent-quantum inputs gain no coherence; all others admit a creating projector.
    Theorem1,
    /// Commutator predicate against directly computed coherence.
    Theorem2,
    /// Per-outcome coherence bound.
    Lemma1,
    /// Average coherence against the summed and maximally entangled bounds.
    Theorem3,
    /// Two-qubit factorization of the average into entanglement times partner average.
    Theorem4,
    /// Unselected marginal of A is unchanged by trace-preserving channels.
    Nosignal,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Theorem1,
        Suite::Theorem2,
        Suite::Lemma1,
        Suite::Theorem3,
        Suite::Theorem4,
        Suite::Nosignal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Theorem1 => "theorem1",
            Suite::Theorem2 => "theorem2",
            Suite::Lemma1 => "lemma1",
            Suite::Theorem3 => "theorem3",
            Suite::Theorem4 => "theorem4",
            Suite::Nosignal => "nosignal",
        }
    }

    /// Operations drawn per state when not overridden.
    pub fn default_per_state(self) -> usize {
        match self {
            Suite::Theorem1 | Suite::Theorem4 => 100,
            _ => 1,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// States per dimension.
    pub samples: usize,
    pub seed: u64,
    /// Operations per state for the theorem1 forward and theorem4 sweeps.
    pub per_state: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum StateSample {
    Pure(BipartitePureState),
    Mixed(BipartiteDensity),
}

/// One drawn instance, enough to rerun the check by hand.
#[derive(Debug, Clone, Serialize)]
pub struct Instance {
    pub sample: usize,
    pub trial: usize,
    pub state: StateSample,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<Channel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    Excluded,
}

#[derive(Debug, Clone, Copy)]
struct Obs {
    value: f64,
    status: Status,
}

impl Obs {
    fn at_most(value: f64, tol: f64) -> Self {
        Obs {
            value,
            status: if value <= tol { Status::Pass } else { Status::Fail },
        }
    }

    fn below(value: f64, tol: f64) -> Self {
        Obs {
            value,
            status: if value < tol { Status::Pass } else { Status::Fail },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    /// Larger values are worse.
    Max,
    /// Smaller values are worse.
    Min,
}

struct CheckSpec {
    name: String,
    statistic: &'static str,
    tolerance: f64,
    sense: Sense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Location {
    pub sample: usize,
    pub trial: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub statistic: &'static str,
    #[serde(serialize_with = "serialize_f64")]
    pub tolerance: f64,
    pub sense: Sense,
    pub evaluated: usize,
    pub violations: usize,
    pub excluded: usize,
    /// Instances whose evaluation returned an error; counted as violations.
    pub errors: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_error: Option<String>,
    #[serde(serialize_with = "serialize_f64")]
    pub worst: f64,
    pub worst_location: Option<Location>,
    pub worst_instance: Option<serde_json::Value>,
    pub passed: bool,
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} evaluated, {} violations, {} excluded, worst {} = {:e} (tolerance {:e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.evaluated,
            self.violations,
            self.excluded,
            self.statistic,
            self.worst,
            self.tolerance
        )?;
        if let Some(e) = &self.first_error {
            write!(f, "; first error: {e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub samples: usize,
    pub per_state: usize,
    pub seed: u64,
    pub checks: Vec<CheckReport>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn violations(&self) -> usize {
        self.checks.iter().map(|c| c.violations).sum()
    }
}

#[derive(Debug, Clone, Default)]
struct Tally {
    evaluated: usize,
    violations: usize,
    excluded: usize,
    errors: usize,
    first_error: Option<String>,
    worst: Option<(f64, Location)>,
    worst_failure: Option<(f64, Location)>,
}

fn worse(sense: Sense, a: f64, b: f64) -> bool {
    match sense {
        Sense::Max => a > b,
        Sense::Min => a < b,
    }
}

fn keep(slot: &mut Option<(f64, Location)>, cand: (f64, Location), sense: Sense) {
    match slot {
        Some((v, _)) if !worse(sense, cand.0, *v) => {}
        _ => *slot = Some(cand),
    }
}

impl Tally {
    fn record(&mut self, obs: Obs, loc: Location, sense: Sense) {
        self.evaluated += 1;
        match obs.status {
            Status::Excluded => self.excluded += 1,
            Status::Pass => keep(&mut self.worst, (obs.value, loc), sense),
            Status::Fail => {
                self.violations += 1;
                keep(&mut self.worst, (obs.value, loc), sense);
                keep(&mut self.worst_failure, (obs.value, loc), sense);
            }
        }
    }

    fn record_error(&mut self, msg: &str) {
        self.evaluated += 1;
        self.violations += 1;
        self.errors += 1;
        if self.first_error.is_none() {
            self.first_error = Some(msg.to_owned());
        }
    }

    fn merge(&mut self, other: Tally, sense: Sense) {
        self.evaluated += other.evaluated;
        self.violations += other.violations;
        self.excluded += other.excluded;
        self.errors += other.errors;
        if self.first_error.is_none() {
            self.first_error = other.first_error;
        }
        if let Some(w) = other.worst {
            keep(&mut self.worst, w, sense);
        }
        if let Some(w) = other.worst_failure {
            keep(&mut self.worst_failure, w, sense);
        }
    }
}

/// Runs `samples × trials` instances. `gen(i, k)` must be a pure function of
/// its indices so that the worst instance can be regenerated afterwards.
fn sweep<G, E>(specs: Vec<CheckSpec>, samples: usize, trials: usize, gen: G, eval: E) -> Result<Vec<CheckReport>>
where
    G: Fn(usize, usize) -> Instance + Sync + Send,
    E: Fn(&Instance) -> rcc_core::Result<Vec<Obs>> + Sync + Send,
{
    let n = specs.len();
    let per_sample = map_indexed(samples, |i| {
        let mut tallies = vec![Tally::default(); n];
        for k in 0..trials {
            let inst = gen(i, k);
            let loc = Location { sample: i, trial: k };
            match eval(&inst) {
                Ok(obs) => {
                    for ((t, o), spec) in tallies.iter_mut().zip(obs).zip(&specs) {
                        t.record(o, loc, spec.sense);
                    }
                }
                Err(e) => {
                    let msg = format!("sample {i} trial {k}: {e}");
                    tallies.iter_mut().for_each(|t| t.record_error(&msg));
                }
            }
        }
        tallies
    })?;

    let mut totals = vec![Tally::default(); n];
    for tallies in per_sample {
        for ((total, t), spec) in totals.iter_mut().zip(tallies).zip(&specs) {
            total.merge(t, spec.sense);
        }
    }

    Ok(specs
        .into_iter()
        .zip(totals)
        .map(|(spec, t)| {
            let pick = t.worst_failure.or(t.worst);
            let worst_instance = pick
                .and_then(|(_, loc)| serde_json::to_value(gen(loc.sample, loc.trial)).ok());
            CheckReport {
                passed: t.violations == 0,
                name: spec.name,
                statistic: spec.statistic,
                tolerance: spec.tolerance,
                sense: spec.sense,
                evaluated: t.evaluated,
                violations: t.violations,
                excluded: t.excluded,
                errors: t.errors,
                first_error: t.first_error,
                worst: pick.map_or(0.0, |(v, _)| v),
                worst_location: pick.map(|(_, loc)| loc),
                worst_instance,
            }
        })
        .collect())
}

fn rng(seed: u64, label: &str, stream: usize) -> SeededRng {
    SeededRng::new(sub_seed(seed, label), stream as u64)
}

fn spec(name: String, statistic: &'static str, tolerance: f64, sense: Sense) -> CheckSpec {
    CheckSpec {
        name,
        statistic,
        tolerance,
        sense,
    }
}

fn dims_label(da: usize, db: usize) -> String {
    format!("{da}x{db}")
}

fn incoherent_quantum_sweep(o: &VerifyOptions, trials: usize) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for (da, db) in [(2, 2), (3, 3)] {
        let dl = dims_label(da, db);
        let s_label = format!("theorem1/forward/{dl}/state");
        let c_label = format!("theorem1/forward/{dl}/operation");
        out.extend(sweep(
            vec![spec(
                format!("theorem1 forward {dl}: incoherent-quantum inputs stay incoherent"),
                "post-selected coherence",
                FORWARD_TOL,
                Sense::Max,
            )],
            o.samples,
            trials,
            |i, k| Instance {
                sample: i,
                trial: k,
                state: StateSample::Mixed(random_incoherent_quantum(da, db, &mut rng(o.seed, &s_label, i))),
                channel: Some(random_kraus_operation(db, &mut rng(o.seed, &c_label, i * trials + k)).into()),
            },
            |inst| {
                let (StateSample::Mixed(rho), Some(Channel::Operation(op))) = (&inst.state, &inst.channel) else {
                    unreachable!("forward instances are mixed with one operation")
                };
                let (out, _) = post_operation_mixed(rho, op)?;
                Ok(vec![Obs::below(l1_coherence(&out), FORWARD_TOL)])
            },
        )?);

        let label = format!("theorem1/converse/{dl}/state");
        out.extend(sweep(
            vec![spec(
                format!("theorem1 converse {dl}: search finds a creating projector"),
                "best coherence found",
                CREATION_THRESHOLD,
                Sense::Min,
            )],
            o.samples,
            1,
            |i, _| {
                let mut r = rng(o.seed, &label, i);
                let state = if i.is_multiple_of(2) {
                    random_bipartite_density(da, db, &mut r)
                } else {
                    random_bipartite_state(da, db, &mut r).to_density()
                };
                Instance {
                    sample: i,
                    trial: 0,
                    state: StateSample::Mixed(state),
                    channel: None,
                }
            },
            |inst| {
                let StateSample::Mixed(rho) = &inst.state else {
                    unreachable!("converse instances are mixed")
                };
                if is_incoherent_quantum(rho.rho(), da, db, CLASSIFY_TOL)? {
                    return Ok(vec![Obs {
                        value: 0.0,
                        status: Status::Excluded,
                    }]);
                }
                let obs = match find_creating_operation(rho) {
                    Ok(Some(found)) => Obs {
                        value: found.coherence,
                        status: if found.coherence > CREATION_THRESHOLD { Status::Pass } else { Status::Fail },
                    },
                    Ok(None) => Obs {
                        value: 0.0,
                        status: Status::Fail,
                    },
                    Err(rcc_core::Error::SearchExhausted { best, .. }) => Obs {
                        value: best,
                        status: Status::Fail,
                    },
                    Err(e) => return Err(e),
                };
                Ok(vec![obs])
            },
        )?);
    }
    Ok(out)
}

/// Operation for the criterion sweep: generic, inert, or a rank-one projector.
fn criterion_operation(psi: &BipartitePureState, i: usize, r: &mut SeededRng) -> KrausOperation {
    let db = psi.dim_b();
    match i % 3 {
        0 => random_kraus_operation(db, r),
        1 => {
            let values: Vec<f64> = (0..db).map(|_| 0.05 + 0.95 * r.uniform()).collect();
            inert_operation(psi, &values).expect("values in range")
        }
        _ => {
            let v = random_pure_state(db, r);
            KrausOperation::single(ComplexMatrix::outer(&v, &v), "projector").expect("rank-one projector")
        }
    }
}

fn criterion_sweep(o: &VerifyOptions) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for d in [2, 3] {
        let dl = dims_label(d, d);
        let label = format!("theorem2/{dl}");
        let mut reports = sweep(
            vec![spec(
                format!("theorem2 {dl}: commutator predicate matches direct computation"),
                "disagreement",
                0.0,
                Sense::Max,
            )],
            o.samples,
            1,
            |i, _| {
                let mut r = rng(o.seed, &label, i);
                let psi = random_zero_coherence_state(d, d, &mut r);
                let op = criterion_operation(&psi, i, &mut r);
                Instance {
                    sample: i,
                    trial: 0,
                    state: StateSample::Pure(psi),
                    channel: Some(op.into()),
                }
            },
            |inst| {
                let (StateSample::Pure(psi), Some(Channel::Operation(op))) = (&inst.state, &inst.channel) else {
                    unreachable!("criterion instances are pure with one operation")
                };
                let c = l1_coherence(&post_operation_pure(psi, op)?.0);
                if (BAND_LOW..=BAND_HIGH).contains(&c) {
                    return Ok(vec![Obs {
                        value: 0.0,
                        status: Status::Excluded,
                    }]);
                }
                let verdict = commutator_criterion(psi, op, CLASSIFY_TOL)?;
                let disagree = verdict.creates != (c > BAND_HIGH);
                Ok(vec![Obs::at_most(if disagree { 1.0 } else { 0.0 }, 0.0)])
            },
        )?;
        let agreement = &reports[0];
        let fraction = agreement.excluded as f64 / agreement.evaluated.max(1) as f64;
        let ok = fraction < MAX_EXCLUDED_FRACTION;
        reports.push(CheckReport {
            name: format!("theorem2 {dl}: fraction excluded by the ambiguity band"),
            statistic: "excluded fraction",
            tolerance: MAX_EXCLUDED_FRACTION,
            sense: Sense::Max,
            evaluated: agreement.evaluated,
            violations: usize::from(!ok),
            excluded: 0,
            errors: 0,
            first_error: None,
            worst: fraction,
            worst_location: None,
            worst_instance: None,
            passed: ok,
        });
        out.extend(reports);
    }
    Ok(out)
}

fn bound_instance(seed: u64, label: &str, d: usize, i: usize) -> Instance {
    let mut r = rng(seed, label, i);
    let psi = random_zero_coherence_state(d, d, &mut r);
    let channel: Channel = if i.is_multiple_of(2) {
        random_tp_channel(d, &mut r).into()
    } else {
        random_ensemble(d, &mut r).into()
    };
    Instance {
        sample: i,
        trial: 0,
        state: StateSample::Pure(psi),
        channel: Some(channel),
    }
}

fn pure_and_channel(inst: &Instance) -> (&BipartitePureState, &Channel) {
    match (&inst.state, &inst.channel) {
        (StateSample::Pure(psi), Some(ch)) => (psi, ch),
        _ => unreachable!("bound instances are pure with a channel"),
    }
}

fn outcome_bound_sweep(o: &VerifyOptions) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for d in [2, 3, 4] {
        let dl = dims_label(d, d);
        let label = format!("lemma1/{dl}");
        out.extend(sweep(
            vec![spec(
                format!("lemma1 {dl}: per-outcome coherence within its bound"),
                "coherence minus bound",
                BOUND_TOL,
                Sense::Max,
            )],
            o.samples,
            1,
            |i, _| bound_instance(o.seed, &label, d, i),
            |inst| {
                let (psi, ch) = pure_and_channel(inst);
                let report = average_rcc(psi, ch)?;
                let excess = report
                    .outcomes
                    .iter()
                    .zip(&report.outcome_bounds)
                    .filter_map(|(oc, b)| b.map(|b| oc.coherence - b))
                    .fold(f64::NEG_INFINITY, f64::max);
                Ok(vec![Obs::at_most(excess, BOUND_TOL)])
            },
        )?);
    }
    Ok(out)
}

fn average_bound_sweep(o: &VerifyOptions) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for d in [2, 3, 4] {
        let dl = dims_label(d, d);
        let label = format!("theorem3/{dl}");
        out.extend(sweep(
            vec![
                spec(
                    format!("theorem3 {dl}: average within the maximally entangled bound"),
                    "average minus bound",
                    BOUND_TOL,
                    Sense::Max,
                ),
                spec(
                    format!("theorem3 {dl}: average within the summed outcome bound"),
                    "average minus summed bound",
                    BOUND_TOL,
                    Sense::Max,
                ),
                spec(
                    format!("theorem3 {dl}: summed outcome bound within the maximally entangled bound"),
                    "summed bound minus bound",
                    BOUND_TOL,
                    Sense::Max,
                ),
            ],
            o.samples,
            1,
            |i, _| bound_instance(o.seed, &label, d, i),
            |inst| {
                let (psi, ch) = pure_and_channel(inst);
                let r = average_rcc(psi, ch)?;
                let bound = r.maxent_bound.expect("square dimensions have a partner");
                Ok(vec![
                    Obs::at_most(r.average_rcc - bound, BOUND_TOL),
                    Obs::at_most(r.average_rcc - r.tighter_bound, BOUND_TOL),
                    Obs::at_most(r.tighter_bound - bound, BOUND_TOL),
                ])
            },
        )?);
    }
    Ok(out)
}

fn factorization_sweep(o: &VerifyOptions, trials: usize) -> Result<Vec<CheckReport>> {
    sweep(
        vec![spec(
            "theorem4 2x2: average equals entanglement times partner average".into(),
            "|average - E * partner average|",
            FACTORIZATION_TOL,
            Sense::Max,
        )],
        o.samples,
        trials,
        |i, k| Instance {
            sample: i,
            trial: k,
            state: StateSample::Pure(random_zero_coherence_state(2, 2, &mut rng(o.seed, "theorem4/state", i))),
            channel: Some(random_tp_channel(2, &mut rng(o.seed, "theorem4/channel", i * trials + k)).into()),
        },
        |inst| {
            let (psi, ch) = pure_and_channel(inst);
            Ok(vec![Obs::below(factorization_check(psi, ch)?.deviation(), FACTORIZATION_TOL)])
        },
    )
}

fn nosignal_sweep(o: &VerifyOptions) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for (da, db) in [(2, 2), (2, 3), (3, 3)] {
        let dl = dims_label(da, db);
        let label = format!("nosignal/{dl}");
        out.extend(sweep(
            vec![spec(
                format!("nosignal {dl}: unselected marginal of A unchanged"),
                "max entry deviation",
                NOSIGNAL_TOL,
                Sense::Max,
            )],
            o.samples,
            1,
            |i, _| {
                let mut r = rng(o.seed, &label, i);
                let state = if i.is_multiple_of(2) {
                    StateSample::Pure(random_bipartite_state(da, db, &mut r))
                } else {
                    StateSample::Mixed(random_bipartite_density(da, db, &mut r))
                };
                Instance {
                    sample: i,
                    trial: 0,
                    state,
                    channel: Some(random_tp_channel(db, &mut r).into()),
                }
            },
            |inst| {
                let ch = inst.channel.as_ref().expect("channel present");
                let mut total = ComplexMatrix::zeros(da, da);
                for branch in ch.branches()? {
                    let part = match &inst.state {
                        StateSample::Pure(psi) => unselected_state_a(psi, &branch)?,
                        StateSample::Mixed(rho) => unselected_state_a(rho, &branch)?,
                    };
                    total = &total + &part;
                }
                let marginal = match &inst.state {
                    StateSample::Pure(psi) => reduced_a(psi),
                    StateSample::Mixed(rho) => reduced_a(rho),
                };
                Ok(vec![Obs::below(total.max_abs_diff(marginal.matrix()), NOSIGNAL_TOL)])
            },
        )?);
    }
    Ok(out)
}

pub fn run_suite(suite: Suite, o: &VerifyOptions) -> Result<SuiteReport> {
    let per_state = o.per_state.unwrap_or_else(|| suite.default_per_state()).max(1);
    let checks = match suite {
        Suite::Theorem1 => incoherent_quantum_sweep(o, per_state)?,
        Suite::Theorem2 => criterion_sweep(o)?,
        Suite::Lemma1 => outcome_bound_sweep(o)?,
        Suite::Theorem3 => average_bound_sweep(o)?,
        Suite::Theorem4 => factorization_sweep(o, per_state)?,
        Suite::Nosignal => nosignal_sweep(o)?,
    };
    let per_state = match suite {
        Suite::Theorem1 | Suite::Theorem4 => per_state,
        _ => 1,
    };
    Ok(SuiteReport {
        suite,
        samples: o.samples,
        per_state,
        seed: o.seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
