// SPDX-License-Identifier: Apache-2.0

//! Builds the input of a workload, runs it on its memory and, when asked,
//! checks the result against the serial oracle.

use cpm_algorithms as algo;
use cpm_algorithms::{AlgoConfig, Kernel1D, Kernel2D, LocalPlan, SortOrder};
use cpm_comparable::{ComparableMemory, FieldLayout, Predicate};
use cpm_computable::{CmpOp, ExecMode};
use cpm_core::CycleLedger;
use cpm_movable::MovableMemory;
use cpm_searchable::SearchableMemory;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Cmp, LimitKind, Mode, Order, Plan, Switch, Workload, WorkloadConfig};
use crate::oracle;
use crate::CliError;

/// What a run produced. `check` holds the oracle's expectation and the
/// matching projection of the result.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub result: Value,
    pub ledger: CycleLedger,
    pub check: Option<(Value, Value)>,
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn run_err(e: cpm_core::CpmError) -> CliError {
    CliError::Config(e.to_string())
}

/// Input values: inline, from a file, or drawn from the seeded generator.
struct Source<'a> {
    cfg: &'a WorkloadConfig,
    rng: SplitMix64,
}

impl<'a> Source<'a> {
    fn new(cfg: &'a WorkloadConfig) -> Self {
        Source {
            cfg,
            rng: SplitMix64::seed_from_u64(cfg.seed),
        }
    }

    fn random(&mut self, count: usize, max: u64) -> Vec<u64> {
        (0..count).map(|_| self.rng.gen_range(0..=max)).collect()
    }

    fn numbers(&mut self, count: Option<usize>, max: u64) -> Result<Vec<u64>, CliError> {
        let given = match (&self.cfg.values, &self.cfg.file) {
            (Some(v), _) => Some(v.clone()),
            (None, Some(path)) => Some(read_numbers(path)?),
            (None, None) => None,
        };
        match (given, count) {
            (Some(v), Some(c)) if v.len() != c => Err(CliError::Config(format!(
                "values: expected {c} items, got {}",
                v.len()
            ))),
            (Some(v), _) => Ok(v),
            (None, Some(c)) => Ok(self.random(c, max)),
            (None, None) => Err(CliError::Config("n: required for random data".into())),
        }
    }

    fn text(&mut self) -> Result<Vec<u8>, CliError> {
        if let Some(t) = &self.cfg.text {
            return Ok(t.as_bytes().to_vec());
        }
        if let Some(p) = &self.cfg.file {
            return std::fs::read(p)
                .map_err(|e| CliError::Config(format!("file: {}: {e}", p.display())));
        }
        let n = self
            .cfg
            .n
            .ok_or_else(|| CliError::Config("n: required for random text".into()))?;
        let alphabet = self
            .cfg
            .alphabet
            .clone()
            .unwrap_or_else(|| "acgt".into())
            .into_bytes();
        Ok((0..n)
            .map(|_| alphabet[self.rng.gen_range(0..alphabet.len())])
            .collect())
    }

    fn below(&mut self, bound: usize) -> usize {
        self.rng.gen_range(0..bound)
    }
}

fn read_numbers(path: &std::path::Path) -> Result<Vec<u64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("file: {}: {e}", path.display())))?;
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| CliError::Config(format!("file: {t:?} is not an unsigned integer")))
        })
        .collect()
}

fn algo_config(cfg: &WorkloadConfig) -> AlgoConfig {
    AlgoConfig {
        width: cfg.width.unwrap_or(32),
        mode: match cfg.mode.unwrap_or_default() {
            Mode::Word => ExecMode::Word,
            Mode::BitSerial => ExecMode::BitSerial,
        },
    }
}

fn cmp_op(c: Cmp) -> CmpOp {
    match c {
        Cmp::Lt => CmpOp::Lt,
        Cmp::Gt => CmpOp::Gt,
        Cmp::Le => CmpOp::Le,
        Cmp::Ge => CmpOp::Ge,
        Cmp::Eq => CmpOp::Eq,
        Cmp::Ne => CmpOp::Ne,
    }
}

fn predicate(c: Cmp) -> Predicate {
    match c {
        Cmp::Lt => Predicate::Lt,
        Cmp::Gt => Predicate::Gt,
        Cmp::Le => Predicate::Le,
        Cmp::Ge => Predicate::Ge,
        Cmp::Eq => Predicate::Eq,
        Cmp::Ne => Predicate::Ne,
    }
}

fn dims(cfg: &WorkloadConfig) -> Result<(usize, usize), CliError> {
    match (cfg.nx, cfg.ny) {
        (Some(x), Some(y)) if x > 0 && y > 0 => Ok((x, y)),
        (None, _) => Err(CliError::Config("nx: required".into())),
        (_, None) => Err(CliError::Config("ny: required".into())),
        _ => Err(CliError::Config("nx: image must not be empty".into())),
    }
}

fn positive(key: &str, v: Option<i64>) -> Result<usize, CliError> {
    match v {
        Some(v) if v > 0 => Ok(v as usize),
        _ => Err(CliError::Config(format!("{key}: must be positive"))),
    }
}

fn plan_kernel(plan: Plan) -> (LocalPlan, Vec<Vec<i64>>) {
    match plan {
        Plan::Smooth3 => (LocalPlan::smooth3(), vec![vec![1, 2, 1]]),
        Plan::Smooth5 => (LocalPlan::smooth5(), vec![vec![1, 2, 4, 2, 1]]),
        Plan::Smooth3x3 => (
            LocalPlan::smooth3x3(),
            vec![vec![1, 2, 1], vec![2, 4, 2], vec![1, 2, 1]],
        ),
    }
}

/// Runs one workload.
pub fn execute(cfg: &WorkloadConfig) -> Result<Outcome, CliError> {
    let mut src = Source::new(cfg);
    let acfg = algo_config(cfg);
    let width = acfg.width;
    let wm = oracle::word_mask(width);
    let max = cfg.max_value.unwrap_or(255);
    let oracle_on = cfg.oracle == Switch::On;
    // Computable workloads see their data already wrapped to the word.
    let words = |v: Vec<u64>| -> Vec<u64> { v.into_iter().map(|x| x & wm).collect() };

    let mut check = None;
    let (result, ledger) = match cfg.workload {
        Workload::Sum1D => {
            let v = words(src.numbers(cfg.n, max)?);
            let r = algo::sum_1d(&v, cfg.m.unwrap_or(1), acfg).map_err(run_err)?;
            if oracle_on {
                check = Some((json!(oracle::sum(&v, width)), json!(r.result)));
            }
            (json!({ "total": r.result }), r.ledger)
        }
        Workload::Sum2D => {
            let (nx, ny) = dims(cfg)?;
            let (mx, my) = (positive("mx", cfg.mx)?, positive("my", cfg.my)?);
            let v = words(src.numbers(Some(nx * ny), max)?);
            let r = algo::sum_2d(&v, nx, ny, mx, my, acfg).map_err(run_err)?;
            if oracle_on {
                check = Some((json!(oracle::sum(&v, width)), json!(r.result)));
            }
            (json!({ "total": r.result }), r.ledger)
        }
        Workload::GlobalLimit => {
            let v = words(src.numbers(cfg.n, max)?);
            let kind = cfg.limit.unwrap_or(LimitKind::Max);
            let which = match kind {
                LimitKind::Max => algo::Limit::Max,
                LimitKind::Min => algo::Limit::Min,
            };
            let r = algo::global_limit(&v, cfg.m.unwrap_or(1), which, acfg).map_err(run_err)?;
            let res = to_json(&r.result);
            if oracle_on {
                let (value, address) = oracle::limit(&v, kind);
                check = Some((json!({ "value": value, "address": address }), res.clone()));
            }
            (res, r.ledger)
        }
        Workload::Threshold => {
            let v = words(src.numbers(cfg.n, max)?);
            let cmp = cfg.cmp.unwrap_or(Cmp::Ge);
            let value = cfg.value.unwrap_or(0) & wm;
            let r = algo::threshold(&v, value, cmp_op(cmp), acfg).map_err(run_err)?;
            let res = to_json(&r.result);
            if oracle_on {
                let flags = oracle::threshold(&v, value, cmp);
                let count = flags.iter().filter(|&&f| f).count();
                check = Some((json!({ "flags": flags, "count": count }), res.clone()));
            }
            (res, r.ledger)
        }
        Workload::Template1D => {
            let data = words(src.numbers(cfg.n, max)?);
            let template = match &cfg.template {
                Some(t) => words(t.clone()),
                None => {
                    let m = cfg.m.unwrap_or(1);
                    if m == 0 || m > data.len() {
                        return Err(CliError::Config(format!(
                            "m: template of {m} items for {} data items",
                            data.len()
                        )));
                    }
                    let at = src.below(data.len() - m + 1);
                    data[at..at + m].to_vec()
                }
            };
            let r = algo::template_search_1d(&data, &template, acfg).map_err(run_err)?;
            let res = to_json(&r.result);
            if oracle_on {
                let (sad, best) = oracle::sad_1d(&data, &template);
                check = Some((json!({ "sad": sad, "best": best }), res.clone()));
            }
            (res, r.ledger)
        }
        Workload::Template2D => {
            let (nx, ny) = dims(cfg)?;
            let (mx, my) = (positive("mx", cfg.mx)?, positive("my", cfg.my)?);
            if mx > nx || my > ny {
                return Err(CliError::Config(format!(
                    "mx: {mx}x{my} template for a {nx}x{ny} image"
                )));
            }
            let image = words(src.numbers(Some(nx * ny), max)?);
            let template = match &cfg.template {
                Some(t) => words(t.clone()),
                None => {
                    let (ox, oy) = (src.below(nx - mx + 1), src.below(ny - my + 1));
                    (0..mx * my)
                        .map(|k| image[(oy + k / mx) * nx + ox + k % mx])
                        .collect()
                }
            };
            let r = algo::template_search_2d(&image, nx, ny, &template, mx, my, acfg)
                .map_err(run_err)?;
            let res = to_json(&r.result);
            if oracle_on && template.len() == mx * my {
                let (sad, best) = oracle::sad_2d(&image, nx, ny, &template, mx, my);
                check = Some((
                    json!({ "sad": sad, "positions_x": nx - mx + 1, "best": [best.0, best.1] }),
                    res.clone(),
                ));
            }
            (res, r.ledger)
        }
        Workload::Sort => {
            let v = words(src.numbers(cfg.n, max)?);
            let order = cfg.order.unwrap_or(Order::Ascending);
            let preferred = match order {
                Order::Ascending => SortOrder::Ascending,
                Order::Descending => SortOrder::Descending,
            };
            let r = algo::hybrid_sort(&v, cfg.m.unwrap_or(0), preferred, acfg).map_err(run_err)?;
            let res = to_json(&r.result);
            if oracle_on {
                let (sorted, chosen) = oracle::sort(&v, order);
                check = Some((
                    json!({ "values": sorted, "order": to_json(&chosen) }),
                    json!({ "values": res["values"], "order": res["order"] }),
                ));
            }
            (res, r.ledger)
        }
        Workload::LocalOp => {
            let plan = cfg.plan.unwrap_or(Plan::Smooth3);
            let (lp, taps) = plan_kernel(plan);
            let (input, nx, ny, r) = if plan == Plan::Smooth3x3 {
                let (nx, ny) = dims(cfg)?;
                let image = words(src.numbers(Some(nx * ny), max)?);
                let k = Kernel2D::new(taps.clone()).map_err(run_err)?;
                let r = algo::run_local_op_2d(&image, nx, ny, &k, &lp, acfg).map_err(run_err)?;
                (image, nx, ny, r)
            } else {
                let data = words(src.numbers(cfg.n, max)?);
                let k = Kernel1D::new(taps[0].clone()).map_err(run_err)?;
                let r = algo::run_local_op_1d(&data, &k, &lp, acfg).map_err(run_err)?;
                let n = data.len();
                (data, n, 1, r)
            };
            if oracle_on {
                let expected = oracle::convolve_2d(&input, nx, ny, &taps, width);
                check = Some((json!(expected), json!(r.result)));
            }
            (json!(r.result), r.ledger)
        }
        Workload::LineSegment => {
            let (nx, ny) = dims(cfg)?;
            let (mx, my) = (cfg.mx.unwrap_or(0), cfg.my.unwrap_or(0));
            let image = words(src.numbers(Some(nx * ny), max)?);
            let r = algo::detect_line_segment(&image, nx, ny, mx, my, acfg).map_err(run_err)?;
            if oracle_on {
                let path = host_path(mx, my);
                let expected = oracle::messenger(&image, nx, ny, mx, my, &path, width);
                check = Some((json!(expected), json!(r.result)));
            }
            (json!(r.result), r.ledger)
        }
        Workload::Lines => {
            let (nx, ny) = dims(cfg)?;
            let d = cfg.d.unwrap_or(1);
            let image = words(src.numbers(Some(nx * ny), max)?);
            let r = algo::detect_all_lines(&image, nx, ny, d, acfg).map_err(run_err)?;
            let res = to_json(&r.result);
            if oracle_on {
                let slopes = algo::with_sign_variants(&algo::build_slope_set(d).map_err(run_err)?);
                let responses: Vec<Vec<Option<i64>>> = slopes
                    .iter()
                    .map(|&(mx, my)| {
                        oracle::messenger(&image, nx, ny, mx, my, &host_path(mx, my), width)
                    })
                    .collect();
                let (strength, arg) = oracle::strongest(&responses, nx * ny, width);
                let slope: Vec<Option<(i64, i64)>> =
                    arg.iter().map(|a| a.map(|k| slopes[k])).collect();
                check = Some((json!({ "strength": strength, "slope": slope }), res.clone()));
            }
            (res, r.ledger)
        }
        Workload::Substring => {
            let text = src.text()?;
            let pattern = match &cfg.pattern {
                Some(p) => p.as_bytes().to_vec(),
                None => {
                    let m = cfg.m.unwrap_or(3);
                    if m == 0 || m > text.len() {
                        return Err(CliError::Config(format!(
                            "m: pattern of {m} bytes for {} bytes of text",
                            text.len()
                        )));
                    }
                    let at = src.below(text.len() - m + 1);
                    text[at..at + m].to_vec()
                }
            };
            if pattern.is_empty() {
                return Err(CliError::Config("pattern: must not be empty".into()));
            }
            let mut mem = SearchableMemory::with_text(&text).map_err(run_err)?;
            let before = mem.ledger();
            let found = mem.find_substring(&pattern, None).map_err(run_err)?;
            let ends = found.linear();
            if oracle_on {
                check = Some((json!(oracle::substring(&text, &pattern)), json!(ends)));
            }
            (
                json!({ "ends": ends, "count": found.count }),
                mem.ledger() - before,
            )
        }
        Workload::Predicate | Workload::Histogram => {
            let fb = cfg.field_bytes.unwrap_or(1);
            let field_max = if fb >= 8 {
                u64::MAX
            } else {
                (1u64 << (8 * fb)) - 1
            };
            let values = src.numbers(cfg.n, max.min(field_max))?;
            if let Some(v) = values.iter().find(|&&v| v > field_max) {
                return Err(CliError::Config(format!(
                    "values: {v} does not fit a {fb}-byte field"
                )));
            }
            let layout = FieldLayout::packed(fb);
            let mut mem = ComparableMemory::with_field(layout, &values).map_err(run_err)?;
            let before = mem.ledger();
            if cfg.workload == Workload::Predicate {
                let cmp = cfg.cmp.unwrap_or(Cmp::Eq);
                let value = cfg.value.unwrap_or(0);
                let found = mem
                    .field_predicate(layout, predicate(cmp), value)
                    .map_err(run_err)?;
                let records: Vec<usize> = found.linear().iter().map(|a| a / fb).collect();
                if oracle_on {
                    let expected: Vec<usize> = oracle::threshold(&values, value, cmp)
                        .iter()
                        .enumerate()
                        .filter(|(_, &f)| f)
                        .map(|(i, _)| i)
                        .collect();
                    check = Some((json!(expected), json!(records)));
                }
                (
                    json!({ "records": records, "count": found.count }),
                    mem.ledger() - before,
                )
            } else {
                let limits = cfg.limits.clone().unwrap_or_default();
                let counts = mem.histogram(layout, &limits).map_err(run_err)?;
                if oracle_on {
                    check = Some((json!(oracle::histogram(&values, &limits)), json!(counts)));
                }
                (json!({ "counts": counts }), mem.ledger() - before)
            }
        }
        Workload::ObjectInsert => {
            let object = match (&cfg.values, &cfg.file) {
                (None, None) => {
                    let n = cfg
                        .n
                        .ok_or_else(|| CliError::Config("n: required".into()))?;
                    src.random(n / 2, max)
                }
                _ => src.numbers(None, max)?,
            };
            let data = match &cfg.insert {
                Some(d) => d.clone(),
                None => src.random(cfg.m.unwrap_or(1), max),
            };
            let capacity = cfg.n.unwrap_or(object.len() + data.len()).max(1);
            let offset = cfg.offset.unwrap_or(0);
            if offset > object.len() {
                return Err(CliError::Config(format!(
                    "offset: {offset} past object length {}",
                    object.len()
                )));
            }
            let mut mem = MovableMemory::new(capacity).map_err(run_err)?;
            let id = mem.create(&object).map_err(run_err)?;
            let before = mem.ledger();
            mem.insert(id, offset, &data).map_err(run_err)?;
            let after = mem.peek_object(id).map_err(run_err)?;
            if oracle_on {
                check = Some((json!(oracle::insert(&object, offset, &data)), json!(after)));
            }
            (json!({ "object": after }), mem.ledger() - before)
        }
    };
    Ok(Outcome {
        result,
        ledger,
        check,
    })
}

fn host_path(mx: i64, my: i64) -> Vec<(i64, i64, i8)> {
    if mx == 0 || my == 0 {
        return vec![];
    }
    algo::messenger_path(mx, my)
        .iter()
        .map(|c| (c.dx, c.dy, c.sign))
        .collect()
}
