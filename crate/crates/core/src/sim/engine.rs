//! Discrete-event execution of the transaction pattern over a simulated
//! calendar.
//!
//! Roots (transactions never targeted by a causal link) spawn instances per
//! workday — a fixed count in deterministic mode, Poisson-distributed in
//! poisson mode. Each instance walks the pattern (happy path unless branch
//! probabilities are configured), accrues the duration/cost of its
//! metrics-bearing steps, and fires causal links, spawning child instances
//! at the target's request step. Wait links order steps inside one instance
//! bundle. Per-label results are averaged over workdays, then replications,
//! dividing exactly once at the end.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::decimal::Decimal;
use crate::ontology::{PsdLinkKind, StepKind, StepRef, TransactionId, ValidatedModel};

use super::analytic::ScenarioResult;
use super::config::{ArrivalModel, SimConfig};
use super::SimError;

/// Bundle expansion safety bound; a causal DAG that fans out past this is
/// almost certainly a modelling mistake.
const MAX_BUNDLE_INSTANCES: usize = 4096;

/// Pattern-order edges inside one instance, branch steps included.
const PATTERN_EDGES: [(StepKind, StepKind); 8] = [
    (StepKind::Rq, StepKind::Pm),
    (StepKind::Pm, StepKind::Ex),
    (StepKind::Ex, StepKind::St),
    (StepKind::St, StepKind::Ac),
    (StepKind::Rq, StepKind::Dc),
    (StepKind::Dc, StepKind::Qt),
    (StepKind::St, StepKind::Rj),
    (StepKind::Rj, StepKind::Sp),
];

fn step_index(step: StepKind) -> usize {
    StepKind::ALL
        .iter()
        .position(|s| *s == step)
        .expect("all steps indexed")
}

#[derive(Clone, Debug)]
struct InstanceSpec {
    transaction: TransactionId,
    /// Parent instance and the parent step whose firing spawns this one;
    /// `None` for the root instance.
    spawned_by: Option<(usize, StepKind)>,
}

#[derive(Clone, Debug)]
struct BundlePlan {
    root: TransactionId,
    /// Spawns per workday before rounding/sampling.
    arrival_rate: Decimal,
    instances: Vec<InstanceSpec>,
    /// Step nodes in a topological order honoring pattern, causal and wait
    /// edges; `(instance index, step)`.
    order: Vec<(usize, StepKind)>,
}

/// Static execution plan: one bundle per spawning root.
pub(crate) struct SimPlan {
    bundles: Vec<BundlePlan>,
    warnings: Vec<String>,
}

impl SimPlan {
    pub(crate) fn new(model: &ValidatedModel) -> Result<SimPlan, SimError> {
        detect_causal_cycles(model)?;

        let causal_targets: BTreeSet<&TransactionId> =
            model.causal_pairs().map(|(_, to)| to).collect();
        let mut warnings = Vec::new();
        let mut bundles = Vec::new();
        for id in model.transactions.keys() {
            if causal_targets.contains(id) {
                continue;
            }
            let arrival_rate = model
                .metrics
                .values()
                .filter(|m| &m.step.transaction == id)
                .map(|m| m.daily_frequency)
                .max()
                .unwrap_or(Decimal::ZERO);
            if arrival_rate > Decimal::ZERO {
                bundles.push(build_bundle(model, id, arrival_rate)?);
            } else {
                warnings.push(format!(
                    "root transaction {id} has no positive-frequency metrics and spawns no instances"
                ));
            }
        }

        // Wait links that never see both ends inside one bundle can never
        // order anything.
        for link in &model.psd_links {
            if link.kind != PsdLinkKind::Wait {
                continue;
            }
            let effective = bundles.iter().any(|b| {
                b.instances
                    .iter()
                    .any(|i| i.transaction == link.from.transaction)
                    && b.instances
                        .iter()
                        .any(|i| i.transaction == link.to.transaction)
            });
            if !effective {
                warnings.push(format!(
                    "wait link {} -> {} never occurs inside one instance bundle",
                    link.from, link.to
                ));
            }
        }

        Ok(SimPlan { bundles, warnings })
    }
}

fn detect_causal_cycles(model: &ValidatedModel) -> Result<(), SimError> {
    let mut adjacency: BTreeMap<&TransactionId, BTreeSet<&TransactionId>> = BTreeMap::new();
    for (from, to) in model.causal_pairs() {
        adjacency.entry(from).or_default().insert(to);
    }
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Grey,
        Black,
    }
    let mut marks: BTreeMap<&TransactionId, Mark> = model
        .transactions
        .keys()
        .map(|id| (id, Mark::White))
        .collect();

    fn visit<'a>(
        node: &'a TransactionId,
        adjacency: &BTreeMap<&'a TransactionId, BTreeSet<&'a TransactionId>>,
        marks: &mut BTreeMap<&'a TransactionId, Mark>,
        stack: &mut Vec<&'a TransactionId>,
    ) -> Result<(), SimError> {
        marks.insert(node, Mark::Grey);
        stack.push(node);
        if let Some(next) = adjacency.get(node) {
            for target in next {
                match marks.get(target).copied().unwrap_or(Mark::Black) {
                    Mark::Grey => {
                        let start = stack.iter().position(|n| n == target).unwrap_or(0);
                        let mut path: Vec<String> =
                            stack[start..].iter().map(|t| t.to_string()).collect();
                        path.push(target.to_string());
                        return Err(SimError::CausalCycle(path.join(" -> ")));
                    }
                    Mark::White => visit(target, adjacency, marks, stack)?,
                    Mark::Black => {}
                }
            }
        }
        stack.pop();
        marks.insert(node, Mark::Black);
        Ok(())
    }

    let ids: Vec<&TransactionId> = model.transactions.keys().collect();
    for id in ids {
        if marks.get(id) == Some(&Mark::White) {
            visit(id, &adjacency, &mut marks, &mut Vec::new())?;
        }
    }
    Ok(())
}

fn build_bundle(
    model: &ValidatedModel,
    root: &TransactionId,
    arrival_rate: Decimal,
) -> Result<BundlePlan, SimError> {
    // Expand instances: one child per causal link per parent instance.
    let mut instances = vec![InstanceSpec {
        transaction: root.clone(),
        spawned_by: None,
    }];
    let mut next = 0;
    while next < instances.len() {
        let tx = instances[next].transaction.clone();
        let children: Vec<_> = model
            .psd_links
            .iter()
            .filter(|l| l.kind == PsdLinkKind::Causal && l.from.transaction == tx)
            .map(|l| (l.from.step, l.to.transaction.clone()))
            .collect();
        for (step, child_tx) in children {
            instances.push(InstanceSpec {
                transaction: child_tx,
                spawned_by: Some((next, step)),
            });
            if instances.len() > MAX_BUNDLE_INSTANCES {
                return Err(SimError::InvalidConfig(format!(
                    "causal links starting at {root} expand past {MAX_BUNDLE_INSTANCES} instances per process occurrence"
                )));
            }
        }
        next += 1;
    }

    // Topological order over (instance, step) nodes with pattern, causal and
    // wait edges. A cycle here means wait links contradict the step order.
    let node_count = instances.len() * StepKind::ALL.len();
    let node_id =
        |instance: usize, step: StepKind| instance * StepKind::ALL.len() + step_index(step);
    let mut successors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); node_count];
    let mut indegree = vec![0usize; node_count];
    let add_edge =
        |successors: &mut Vec<BTreeSet<usize>>, indegree: &mut Vec<usize>, a: usize, b: usize| {
            if successors[a].insert(b) {
                indegree[b] += 1;
            }
        };

    for (idx, spec) in instances.iter().enumerate() {
        for (from, to) in PATTERN_EDGES {
            add_edge(
                &mut successors,
                &mut indegree,
                node_id(idx, from),
                node_id(idx, to),
            );
        }
        if let Some((parent, step)) = spec.spawned_by {
            add_edge(
                &mut successors,
                &mut indegree,
                node_id(parent, step),
                node_id(idx, StepKind::Rq),
            );
        }
    }
    for link in &model.psd_links {
        if link.kind != PsdLinkKind::Wait {
            continue;
        }
        for (i, source) in instances.iter().enumerate() {
            if source.transaction != link.from.transaction {
                continue;
            }
            for (j, target) in instances.iter().enumerate() {
                if target.transaction != link.to.transaction {
                    continue;
                }
                if i == j && link.from.step == link.to.step {
                    return Err(SimError::PsdCycle(format!(
                        "wait link {} -> {} waits on itself",
                        link.from, link.to
                    )));
                }
                add_edge(
                    &mut successors,
                    &mut indegree,
                    node_id(i, link.from.step),
                    node_id(j, link.to.step),
                );
            }
        }
    }

    // Kahn's algorithm with index order as the deterministic tie-break.
    let mut ready: BTreeSet<usize> = (0..node_count).filter(|n| indegree[*n] == 0).collect();
    let mut order = Vec::with_capacity(node_count);
    while let Some(&node) = ready.iter().next() {
        ready.remove(&node);
        order.push((
            node / StepKind::ALL.len(),
            StepKind::ALL[node % StepKind::ALL.len()],
        ));
        for &succ in &successors[node] {
            indegree[succ] -= 1;
            if indegree[succ] == 0 {
                ready.insert(succ);
            }
        }
    }
    if order.len() != node_count {
        return Err(SimError::PsdCycle(format!(
            "wait links contradict the step order inside the process started by {root}"
        )));
    }

    Ok(BundlePlan {
        root: root.clone(),
        arrival_rate,
        instances,
        order,
    })
}

/// Which branch one instance takes through the pattern.
#[derive(Clone, Copy, Debug, PartialEq)]
enum InstancePath {
    Happy,
    Declined,
    Rejected,
}

impl InstancePath {
    fn fires(&self, step: StepKind) -> bool {
        use StepKind::*;
        match self {
            InstancePath::Happy => matches!(step, Rq | Pm | Ex | St | Ac),
            InstancePath::Declined => matches!(step, Rq | Dc | Qt),
            InstancePath::Rejected => matches!(step, Rq | Pm | Ex | St | Rj | Sp),
        }
    }

    fn steps(&self) -> Vec<StepKind> {
        use StepKind::*;
        match self {
            InstancePath::Happy => vec![Rq, Pm, Ex, St, Ac],
            InstancePath::Declined => vec![Rq, Dc, Qt],
            InstancePath::Rejected => vec![Rq, Pm, Ex, St, Rj, Sp],
        }
    }
}

fn sample_path(tx: &TransactionId, config: &SimConfig, rng: &mut ChaCha8Rng) -> InstancePath {
    // Probabilities default to zero and zero-probability branches draw
    // nothing, so plain configurations consume no randomness here.
    let p_decline = config.decline_probability.get(tx).copied().unwrap_or(0.0);
    if p_decline > 0.0 && rng.random::<f64>() < p_decline {
        return InstancePath::Declined;
    }
    let p_reject = config.reject_probability.get(tx).copied().unwrap_or(0.0);
    if p_reject > 0.0 && rng.random::<f64>() < p_reject {
        return InstancePath::Rejected;
    }
    InstancePath::Happy
}

/// Execution record kept alongside the averaged result.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimTrace {
    /// Total instances spawned per workday, one inner vector per replication.
    pub daily_arrivals: Vec<Vec<u64>>,
    /// Distinct step traces walked by instances (all satisfy the pattern).
    pub instance_traces: BTreeSet<Vec<StepKind>>,
}

/// Runs the simulation and returns the averaged per-label result.
pub fn simulate(model: &ValidatedModel, config: &SimConfig) -> Result<ScenarioResult, SimError> {
    simulate_traced(model, config).map(|(result, _)| result)
}

/// [`simulate`] plus the per-day arrival trace and observed step traces.
pub fn simulate_traced(
    model: &ValidatedModel,
    config: &SimConfig,
) -> Result<(ScenarioResult, SimTrace), SimError> {
    config.validate()?;
    if model.metrics.is_empty() {
        return Err(SimError::NoMetrics);
    }
    let plan = SimPlan::new(model)?;

    let workdays = config.workdays();
    let replications = config.replications;
    let capacity = Decimal::from(config.day_capacity_minutes());

    // Every reporting label appears in the result, fired or not, matching
    // the analytic row set.
    let mut grand: BTreeMap<String, (Decimal, Decimal)> = model
        .metrics
        .values()
        .map(|m| (m.label.clone(), (Decimal::ZERO, Decimal::ZERO)))
        .collect();

    let mut trace = SimTrace::default();
    let mut over_capacity_days = 0u64;
    let mut max_day_time = Decimal::ZERO;

    for replication in 0..replications {
        // Independent, reproducible stream per replication.
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(replication as u64);
        let mut daily = Vec::with_capacity(workdays as usize);

        for _day in 0..workdays {
            let mut day_time = Decimal::ZERO;
            let mut day_arrivals = 0u64;
            for bundle in &plan.bundles {
                let count = match config.arrival_model {
                    ArrivalModel::Deterministic => bundle.arrival_rate.round_to_i64().max(0) as u64,
                    ArrivalModel::Poisson => {
                        let poisson = Poisson::new(bundle.arrival_rate.to_f64()).map_err(|e| {
                            SimError::InvalidConfig(format!(
                                "arrival rate {} for {} is not a valid Poisson rate: {e}",
                                bundle.arrival_rate, bundle.root
                            ))
                        })?;
                        poisson.sample(&mut rng) as u64
                    }
                };
                day_arrivals += count;
                for _ in 0..count {
                    run_bundle(
                        bundle,
                        model,
                        config,
                        &mut rng,
                        &mut grand,
                        &mut day_time,
                        &mut trace,
                    );
                }
            }
            daily.push(day_arrivals);
            if day_time > capacity {
                over_capacity_days += 1;
            }
            if day_time > max_day_time {
                max_day_time = day_time;
            }
        }
        trace.daily_arrivals.push(daily);
    }

    // Average: divide the grand totals once, by workdays × replications.
    let divisor = Decimal::from_int(workdays as i64 * replications as i64);
    for value in grand.values_mut() {
        value.0 = value.0 / divisor;
        value.1 = value.1 / divisor;
    }

    let mut warnings = plan.warnings.clone();
    if over_capacity_days > 0 {
        let total_days = workdays as u64 * replications as u64;
        warnings.push(format!(
            "utilization: daily time exceeded the {capacity} min capacity on {over_capacity_days} of {total_days} simulated workdays (max {max_day_time} min)"
        ));
    }

    let result = ScenarioResult::from_label_totals(
        model.name.clone(),
        grand,
        replications,
        Some(config.clone()),
        warnings,
    );
    Ok((result, trace))
}

#[allow(clippy::too_many_arguments)]
fn run_bundle(
    bundle: &BundlePlan,
    model: &ValidatedModel,
    config: &SimConfig,
    rng: &mut ChaCha8Rng,
    grand: &mut BTreeMap<String, (Decimal, Decimal)>,
    day_time: &mut Decimal,
    trace: &mut SimTrace,
) {
    let mut paths: Vec<Option<InstancePath>> = vec![None; bundle.instances.len()];
    paths[0] = Some(sample_path(&bundle.root, config, rng));

    for &(instance, step) in &bundle.order {
        let Some(path) = paths[instance] else {
            continue;
        };
        if !path.fires(step) {
            continue;
        }
        let step_ref = StepRef {
            transaction: bundle.instances[instance].transaction.clone(),
            step,
        };
        if let Some(metrics) = model.metrics.get(&step_ref) {
            let entry = grand.get_mut(&metrics.label).expect("labels preseeded");
            entry.0 += metrics.duration;
            entry.1 += metrics.cost;
            *day_time += metrics.duration;
        }
        // Spawn children attached to this firing step.
        for (child_idx, spec) in bundle.instances.iter().enumerate() {
            if spec.spawned_by == Some((instance, step)) && paths[child_idx].is_none() {
                paths[child_idx] = Some(sample_path(&spec.transaction, config, rng));
            }
        }
    }

    for path in paths.into_iter().flatten() {
        trace.instance_traces.insert(path.steps());
    }
}
