//! Scenario steps as a dependency graph, run on a bounded worker pool.

use std::any::Any;
use std::collections::{BTreeMap, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, Condvar, Mutex};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Value a step hands to the steps that depend on it.
pub type Artifact = Arc<dyn Any + Send + Sync>;

pub type StepError = Box<dyn std::error::Error + Send + Sync>;

type StepFn = Box<dyn FnOnce(&[Artifact]) -> Result<StepOutput, StepError> + Send>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub name: String,
    #[serde(skip)]
    pub contents: Vec<u8>,
}

#[derive(Default)]
pub struct StepOutput {
    pub measurements: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub files: Vec<OutputFile>,
    pub artifact: Option<Artifact>,
}

impl StepOutput {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn measure(&mut self, key: &str, value: impl Serialize) {
        self.measurements.insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    pub fn file(&mut self, name: impl Into<String>, contents: Vec<u8>) {
        self.files.push(OutputFile { name: name.into(), contents });
    }

    pub fn with_artifact<T: Any + Send + Sync>(mut self, value: T) -> Self {
        self.artifact = Some(Arc::new(value));
        self
    }
}

/// Typed view of a dependency's artifact.
pub fn input<T: Any + Send + Sync>(inputs: &[Artifact], k: usize) -> Result<&T, StepError> {
    inputs.get(k).and_then(|a| a.downcast_ref::<T>()).ok_or_else(|| format!("input {k} has an unexpected type").into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "kebab-case")]
pub enum StepStatus {
    Completed,
    Failed { error: String },
    Skipped { reason: String },
}

#[derive(Clone, Debug)]
pub struct StepResult {
    pub name: String,
    pub deps: Vec<String>,
    pub status: StepStatus,
    pub measurements: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub files: Vec<OutputFile>,
    pub seconds: f64,
}

struct Node {
    name: String,
    deps: Vec<usize>,
    run: StepFn,
}

#[derive(Default)]
pub struct Plan {
    nodes: Vec<Node>,
}

struct State {
    ready: VecDeque<usize>,
    waiting: Vec<usize>,
    runs: Vec<Option<StepFn>>,
    artifacts: Vec<Option<Artifact>>,
    results: Vec<Option<StepResult>>,
    done: usize,
}

fn panic_message(p: Box<dyn Any + Send>) -> String {
    match p.downcast::<String>() {
        Ok(s) => *s,
        Err(p) => p.downcast_ref::<&str>().map(|s| s.to_string()).unwrap_or_else(|| "panic".into()),
    }
}

impl Plan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Adds a step and returns its id. Dependencies must already be in the
    /// plan, so every plan is acyclic by construction.
    pub fn add<F>(&mut self, name: impl Into<String>, deps: &[usize], run: F) -> usize
    where
        F: FnOnce(&[Artifact]) -> Result<StepOutput, StepError> + Send + 'static,
    {
        let id = self.nodes.len();
        assert!(deps.iter().all(|&d| d < id), "dependencies must precede the step");
        self.nodes.push(Node { name: name.into(), deps: deps.to_vec(), run: Box::new(run) });
        id
    }

    /// Runs every step with at most `workers` in flight, each inside a rayon
    /// pool of the same size. A failed or panicking step is recorded and its
    /// dependents are skipped; independent steps still run. Results come back
    /// in plan order whatever the schedule was.
    pub fn execute(self, workers: usize) -> Vec<StepResult> {
        let n = self.nodes.len();
        if n == 0 {
            return Vec::new();
        }
        let workers = workers.clamp(1, n);
        let names: Vec<String> = self.nodes.iter().map(|s| s.name.clone()).collect();
        let deps: Vec<Vec<usize>> = self.nodes.iter().map(|s| s.deps.clone()).collect();
        let mut dependents = vec![Vec::new(); n];
        for (i, d) in deps.iter().enumerate() {
            for &j in d {
                dependents[j].push(i);
            }
        }
        let state = Mutex::new(State {
            ready: (0..n).filter(|&i| deps[i].is_empty()).collect(),
            waiting: deps.iter().map(|d| d.len()).collect(),
            runs: self.nodes.into_iter().map(|s| Some(s.run)).collect(),
            artifacts: vec![None; n],
            results: (0..n).map(|_| None).collect(),
            done: 0,
        });
        let wake = Condvar::new();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool");
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| {
                    let mut guard = state.lock().unwrap();
                    loop {
                        if guard.done == n {
                            break;
                        }
                        let Some(id) = guard.ready.pop_front() else {
                            guard = wake.wait(guard).unwrap();
                            continue;
                        };
                        let run = guard.runs[id].take().expect("each step runs once");
                        let missing = deps[id].iter().find(|&&d| guard.artifacts[d].is_none()).copied();
                        let inputs: Vec<Artifact> = deps[id].iter().filter_map(|&d| guard.artifacts[d].clone()).collect();
                        drop(guard);

                        let start = Instant::now();
                        let (status, output) = match missing {
                            Some(d) => (StepStatus::Skipped { reason: format!("dependency `{}` did not complete", names[d]) }, None),
                            None => match catch_unwind(AssertUnwindSafe(|| pool.install(|| run(&inputs)))) {
                                Ok(Ok(out)) => (StepStatus::Completed, Some(out)),
                                Ok(Err(e)) => (StepStatus::Failed { error: e.to_string() }, None),
                                Err(p) => (StepStatus::Failed { error: format!("panicked: {}", panic_message(p)) }, None),
                            },
                        };
                        let seconds = start.elapsed().as_secs_f64();
                        let output = output.unwrap_or_default();
                        let artifact = matches!(status, StepStatus::Completed).then(|| output.artifact.clone().unwrap_or_else(|| Arc::new(())));
                        let result = StepResult {
                            name: names[id].clone(),
                            deps: deps[id].iter().map(|&d| names[d].clone()).collect(),
                            status,
                            measurements: output.measurements,
                            checks: output.checks,
                            files: output.files,
                            seconds,
                        };

                        guard = state.lock().unwrap();
                        guard.artifacts[id] = artifact;
                        guard.results[id] = Some(result);
                        guard.done += 1;
                        for &c in &dependents[id] {
                            guard.waiting[c] -= 1;
                            if guard.waiting[c] == 0 {
                                guard.ready.push_back(c);
                            }
                        }
                        wake.notify_all();
                    }
                });
            }
        });
        state.into_inner().unwrap().results.into_iter().map(|r| r.expect("every step finishes")).collect()
    }
}

#[cfg(test)]
mod tests {
    use std::sync::atomic::{AtomicUsize, Ordering};

    use super::*;

    #[test]
    fn values_flow_along_edges() {
        for workers in [1, 3] {
            let mut plan = Plan::new();
            let a = plan.add("a", &[], |_| Ok(StepOutput::new().with_artifact(3u64)));
            let b = plan.add("b", &[], |_| Ok(StepOutput::new().with_artifact(4u64)));
            plan.add("sum", &[a, b], |inp| {
                let mut out = StepOutput::new();
                out.measure("sum", input::<u64>(inp, 0)? + input::<u64>(inp, 1)?);
                Ok(out)
            });
            let r = plan.execute(workers);
            assert_eq!(r[2].measurements["sum"], 7);
            assert_eq!(r[2].deps, vec!["a".to_string(), "b".to_string()]);
            assert!(input::<u32>(&[Arc::new(1u64)], 0).is_err());
        }
    }

    #[test]
    fn failures_skip_dependents_only() {
        let mut plan = Plan::new();
        let bad = plan.add("bad", &[], |_| Err("no luck".into()));
        let boom = plan.add("boom", &[], |_| panic!("kaboom"));
        let ok = plan.add("ok", &[], |_| Ok(StepOutput::new()));
        plan.add("after-bad", &[bad, ok], |_| Ok(StepOutput::new()));
        plan.add("after-boom", &[boom], |_| Ok(StepOutput::new()));
        plan.add("after-ok", &[ok], |_| Ok(StepOutput::new()));
        let r = plan.execute(2);
        assert_eq!(r[0].status, StepStatus::Failed { error: "no luck".into() });
        assert!(matches!(&r[1].status, StepStatus::Failed { error } if error.contains("kaboom")));
        assert_eq!(r[2].status, StepStatus::Completed);
        assert!(matches!(&r[3].status, StepStatus::Skipped { reason } if reason.contains("`bad`")));
        assert!(matches!(r[4].status, StepStatus::Skipped { .. }));
        assert_eq!(r[5].status, StepStatus::Completed);
    }

    #[test]
    fn concurrency_stays_within_the_bound() {
        let live = Arc::new(AtomicUsize::new(0));
        let peak = Arc::new(AtomicUsize::new(0));
        let mut plan = Plan::new();
        for k in 0..12 {
            let (live, peak) = (live.clone(), peak.clone());
            plan.add(format!("s{k}"), &[], move |_| {
                let now = live.fetch_add(1, Ordering::SeqCst) + 1;
                peak.fetch_max(now, Ordering::SeqCst);
                std::thread::sleep(std::time::Duration::from_millis(5));
                live.fetch_sub(1, Ordering::SeqCst);
                Ok(StepOutput::new())
            });
        }
        let r = plan.execute(3);
        assert_eq!(r.len(), 12);
        assert!(peak.load(Ordering::SeqCst) <= 3);
        assert!(r.iter().all(|s| s.status == StepStatus::Completed));
    }
}
