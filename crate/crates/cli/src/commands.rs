use std::collections::BTreeMap;

use serde::Serialize;
use treebag::closed_form::ClosedFormReport;
use treebag::exact::{bag_count_law, matrix_tree_count, to_f64, CountTable, ExactScalar};
use treebag::graph::{complete_graph, parse_rational, ProductGraph, TreeGraph, WeightedGraph};
use treebag::walk::{
    bag_count_distribution, escape_curve, memorable_tail_curve, phase_probe, EstimatorReport, RngStream,
};

use crate::args::{ClosedFormArgs, CountArgs, Experiment, Format, SampleArgs};
use crate::report::{csv, emit, fiber, json, usage, ExperimentConfig, Failure};

/// Vertex cap for the exact law behind `--self-check`.
const SELF_CHECK_CAP: usize = 2048;

/// Allowed distance between an estimate and its exact value, in standard
/// errors computed from the exact probability.
const SELF_CHECK_SIGMAS: f64 = 4.0;

/// Largest height checked by `count --verify`.
const VERIFY_MAX_N: usize = 3;

fn exact_weight(w: &str) -> Result<ExactScalar, Failure> {
    parse_rational(w).ok_or_else(|| Failure::Usage(format!("cannot parse weight {w:?}")))
}

#[derive(Serialize)]
struct CountRowOut {
    n: usize,
    a: String,
    a_prime: String,
    t_ball: Option<String>,
    c: f64,
    s: Option<f64>,
}

#[derive(Serialize)]
struct CountOut {
    rows: Vec<CountRowOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verified_up_to: Option<usize>,
}

pub fn count(args: &CountArgs) -> Result<(), Failure> {
    let w = exact_weight(&args.w)?;
    let mut table = CountTable::up_to(args.d, w.clone(), args.n).map_err(usage)?;
    let mut rows = Vec::with_capacity(args.n + 1);
    for n in 0..=args.n {
        let t_ball = if n == 0 { None } else { Some(table.count_ball(n).map_err(usage)?.to_string()) };
        rows.push(CountRowOut {
            n,
            a: table.a(n).to_string(),
            a_prime: table.a_prime(n).to_string(),
            t_ball,
            c: to_f64(&table.c(n).expect("row exists")),
            s: table.s(n).map(|s| to_f64(&s)),
        });
    }
    let mut mismatch = None;
    let mut verified_up_to = None;
    if args.verify {
        let top = args.n.min(VERIFY_MAX_N);
        for n in 0..=top {
            let perfect = ProductGraph::new(TreeGraph::perfect(args.d, n).map_err(usage)?, complete_graph(2), w.clone())
                .map_err(usage)?;
            if matrix_tree_count(perfect.graph()) != table.a(n) {
                mismatch.get_or_insert(format!("a_{n} disagrees with the determinant"));
            }
            if n >= 1 {
                let ball = ProductGraph::new(TreeGraph::ball(args.d, n).map_err(usage)?, complete_graph(2), w.clone())
                    .map_err(usage)?;
                if matrix_tree_count(ball.graph()) != table.count_ball(n).map_err(usage)? {
                    mismatch.get_or_insert(format!("t(T̂_{n}) disagrees with the determinant"));
                }
            }
        }
        if mismatch.is_none() {
            verified_up_to = Some(top);
        }
    }
    let format = args.output.format.unwrap_or(Format::Csv);
    let config = ExperimentConfig {
        command: "count",
        d: args.d,
        w: Some(args.w.clone()),
        n: Some(args.n),
        format: Some(format),
        output: args.output.output.as_ref().map(|p| p.display().to_string()),
        verify: args.verify,
        ..Default::default()
    };
    let text = match format {
        Format::Json => json(&config, &CountOut { rows, verified_up_to }),
        Format::Csv => {
            let lines: Vec<String> = rows
                .iter()
                .map(|r| {
                    format!(
                        "{},{},{},{},{:?},{}",
                        r.n,
                        r.a,
                        r.a_prime,
                        r.t_ball.clone().unwrap_or_default(),
                        r.c,
                        r.s.map(|s| format!("{s:?}")).unwrap_or_default()
                    )
                })
                .collect();
            csv(&config, "n,a_n,a_prime_n,t_ball_n,c_n,s_n", &lines)
        }
    };
    emit(&args.output, &text)?;
    match mismatch {
        Some(msg) => Err(Failure::Verification(msg)),
        None => Ok(()),
    }
}

pub fn closed_form(args: &ClosedFormArgs) -> Result<(), Failure> {
    let (grid, single) = match (&args.w, &args.w_grid) {
        (Some(w), None) => (vec![*w], true),
        (None, Some(grid)) if !grid.is_empty() => (grid.clone(), false),
        _ => return Err(Failure::Usage("give either -w or a non-empty --w-grid".into())),
    };
    let reports = grid
        .iter()
        .map(|&w| ClosedFormReport::new(args.d, w, args.m_max))
        .collect::<Result<Vec<_>, _>>()
        .map_err(usage)?;
    let format = args.output.format.unwrap_or(if single { Format::Json } else { Format::Csv });
    let labels: Vec<String> = grid.iter().map(|w| format!("{w:?}")).collect();
    let config = ExperimentConfig {
        command: "closed-form",
        d: args.d,
        w: single.then(|| labels[0].clone()),
        w_grid: (!single).then(|| labels.clone()),
        m_max: Some(args.m_max),
        format: Some(format),
        output: args.output.output.as_ref().map(|p| p.display().to_string()),
        ..Default::default()
    };
    let text = match (format, single) {
        (Format::Json, true) => json(&config, &reports[0]),
        (Format::Json, false) => json(&config, &reports),
        (Format::Csv, _) => {
            let rows: Vec<String> = reports.iter().map(|r| r.csv_row()).collect();
            csv(&config, ClosedFormReport::CSV_HEADER, &rows)
        }
    };
    emit(&args.output, &text)
}

/// Exact law `t_m / t` when the fiber is the unit-weight edge.
fn exact_law(h: &WeightedGraph<f64>, d: usize, w: &str, n: usize) -> Result<Option<BTreeMap<usize, f64>>, Failure> {
    let is_edge = h.vertex_count() == 2 && h.edge_count() == 1 && h.edge(0).weight == 1.0;
    if !is_edge {
        return Ok(None);
    }
    let law = bag_count_law(d, &exact_weight(w)?, n, SELF_CHECK_CAP).map_err(usage)?;
    Ok(Some(law.into_iter().map(|(m, p)| (m, to_f64(&p))).collect()))
}

/// Mass of the classes with more than `m + 1` bags, i.e. paths reaching depth `m + 1`.
fn escape_mass(law: &BTreeMap<usize, f64>, m: usize) -> f64 {
    law.range(m + 2..).map(|(_, p)| p).sum()
}

fn within(report: &EstimatorReport, exact: f64) -> bool {
    let sigma = (exact * (1.0 - exact) / report.samples as f64).sqrt();
    (report.estimate - exact).abs() <= SELF_CHECK_SIGMAS * sigma + 1e-12
}

#[derive(Serialize)]
struct Estimate {
    #[serde(skip_serializing_if = "Option::is_none")]
    w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    m: usize,
    #[serde(flatten)]
    report: EstimatorReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<f64>,
}

impl Estimate {
    fn csv_row(&self) -> String {
        let mut cells = Vec::new();
        if let Some(w) = self.w {
            cells.push(format!("{w:?}"));
        }
        if let Some(n) = self.n {
            cells.push(n.to_string());
        }
        cells.push(self.m.to_string());
        for x in [self.report.estimate, self.report.std_error, self.report.ci99[0], self.report.ci99[1]] {
            cells.push(format!("{x:?}"));
        }
        cells.push(self.exact.map(|x| format!("{x:?}")).unwrap_or_default());
        cells.join(",")
    }
}

#[derive(Serialize)]
struct SampleOut<'a> {
    samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    hypotheses: Option<&'a treebag::walk::HypothesisFlags>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fiber: Option<&'a treebag::graph::FiberReport>,
    estimates: Vec<Estimate>,
}

fn need<T: Copy>(value: Option<T>, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::Usage(format!("missing {flag}")))
}

fn real(w: &str) -> Result<f64, Failure> {
    w.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite() && *x > 0.0)
        .ok_or_else(|| Failure::Usage(format!("weight must be a positive number, got {w:?}")))
}

pub fn sample(args: &SampleArgs) -> Result<(), Failure> {
    if args.samples == 0 {
        return Err(Failure::Usage("-N must be positive".into()));
    }
    let h = fiber(&args.h)?;
    let stream = RngStream::new(args.seed, 0);
    let mut config = ExperimentConfig {
        command: "sample",
        experiment: Some(args.experiment),
        d: args.d,
        h: Some(args.h.clone()),
        samples: Some(args.samples),
        seed: Some(args.seed),
        output: args.output.output.as_ref().map(|p| p.display().to_string()),
        self_check: args.self_check,
        ..Default::default()
    };
    let mut failures = Vec::new();
    let mut table = None;
    let estimates = match args.experiment {
        Experiment::Dist | Experiment::Escape | Experiment::Memorable => {
            let w = args.w.clone().ok_or_else(|| Failure::Usage("missing -w".into()))?;
            let n = need(args.n, "-n")?;
            config.w = Some(w.clone());
            config.n = Some(n);
            let law = if args.self_check {
                let law = exact_law(&h, args.d, &w, n)?;
                if law.is_none() && args.experiment != Experiment::Memorable {
                    return Err(Failure::Usage("--self-check needs --H K2".into()));
                }
                law
            } else {
                None
            };
            match args.experiment {
                Experiment::Dist => {
                    let report =
                        bag_count_distribution(args.d, &h, real(&w)?, n, (0, 1), args.samples, stream).map_err(usage)?;
                    let mut classes: Vec<usize> = report.classes.keys().copied().collect();
                    if let Some(law) = &law {
                        classes.extend(law.keys());
                    }
                    classes.sort_unstable();
                    classes.dedup();
                    classes
                        .into_iter()
                        .map(|m| Estimate {
                            w: None,
                            n: None,
                            m,
                            report: report.class(m),
                            exact: law.as_ref().map(|l| l.get(&m).copied().unwrap_or(0.0)),
                        })
                        .collect::<Vec<_>>()
                }
                Experiment::Escape => {
                    let m = need(args.m, "-m")?;
                    config.m = Some(m);
                    let report =
                        escape_curve(args.d, &h, real(&w)?, n, &[m], (0, 1), args.samples, stream).map_err(usage)?[0];
                    vec![Estimate { w: None, n: None, m, report, exact: law.as_ref().map(|l| escape_mass(l, m)) }]
                }
                _ => {
                    let ms: Vec<usize> = match (args.m_max, args.m) {
                        (Some(top), _) => {
                            config.m_max = Some(top);
                            (0..=top).collect()
                        }
                        (None, Some(m)) => {
                            config.m = Some(m);
                            vec![m]
                        }
                        (None, None) => return Err(Failure::Usage("missing -m or --m-max".into())),
                    };
                    let reports =
                        memorable_tail_curve(args.d, &h, real(&w)?, n, &ms, args.samples, stream).map_err(usage)?;
                    if args.self_check && reports.windows(2).any(|p| p[1].estimate > p[0].estimate) {
                        failures.push("memorable tail increases in m".to_string());
                    }
                    ms.into_iter()
                        .zip(reports)
                        .map(|(m, report)| Estimate { w: None, n: None, m, report, exact: None })
                        .collect()
                }
            }
        }
        Experiment::Phase => {
            let w_grid = match (&args.w_grid, &args.w) {
                (Some(grid), _) => grid.clone(),
                (None, Some(w)) => vec![w.clone()],
                (None, None) => return Err(Failure::Usage("missing -w or --w-grid".into())),
            };
            let n_grid = match (&args.n_grid, args.n) {
                (Some(grid), _) => grid.clone(),
                (None, Some(n)) => vec![n],
                (None, None) => return Err(Failure::Usage("missing -n or --n-grid".into())),
            };
            let m = need(args.m, "-m")?;
            config.w_grid = Some(w_grid.clone());
            config.n_grid = Some(n_grid.clone());
            config.m = Some(m);
            let reals = w_grid.iter().map(|w| real(w)).collect::<Result<Vec<_>, _>>()?;
            let probe = phase_probe(args.d, &h, &reals, &n_grid, m, args.samples, stream).map_err(usage)?;
            let mut estimates = Vec::with_capacity(probe.rows.len());
            let labels = w_grid.iter().flat_map(|w| n_grid.iter().map(move |&n| (w, n)));
            for (row, (label, n)) in probe.rows.iter().zip(labels) {
                let exact = if args.self_check {
                    let law = exact_law(&h, args.d, label, n)?
                        .ok_or_else(|| Failure::Usage("--self-check needs --H K2".into()))?;
                    Some(escape_mass(&law, m))
                } else {
                    None
                };
                estimates.push(Estimate { w: Some(row.w), n: Some(row.n), m: row.m, report: row.escape, exact });
            }
            table = Some(probe);
            estimates
        }
    };
    for e in &estimates {
        if let Some(exact) = e.exact {
            if args.self_check && !within(&e.report, exact) {
                failures.push(format!(
                    "m = {}: estimate {} is more than {SELF_CHECK_SIGMAS} sigma from {exact}",
                    e.m, e.report.estimate
                ));
            }
        }
    }
    let format = args.output.format.unwrap_or(Format::Json);
    config.format = Some(format);
    let text = match format {
        Format::Json => json(
            &config,
            &SampleOut {
                samples: args.samples,
                hypotheses: table.as_ref().map(|t| &t.hypotheses),
                fiber: table.as_ref().map(|t| &t.fiber),
                estimates,
            },
        ),
        Format::Csv => {
            let header = if args.experiment == Experiment::Phase {
                "w,n,m,estimate,std_error,ci99_low,ci99_high,exact"
            } else {
                "m,estimate,std_error,ci99_low,ci99_high,exact"
            };
            let rows: Vec<String> = estimates.iter().map(Estimate::csv_row).collect();
            csv(&config, header, &rows)
        }
    };
    emit(&args.output, &text)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::SelfCheck(failures.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(estimate: f64, samples: u64) -> EstimatorReport {
        EstimatorReport { estimate, samples, std_error: 0.0, ci99: [estimate, estimate] }
    }

    #[test]
    fn tolerance_uses_exact_sigma() {
        // sigma = 0.005 at p = 0.5, N = 10^4
        assert!(within(&report(0.519, 10_000), 0.5));
        assert!(!within(&report(0.521, 10_000), 0.5));
        assert!(within(&report(0.0, 10), 0.0));
        assert!(!within(&report(0.1, 10), 0.0));
    }

    #[test]
    fn escape_mass_counts_deep_classes() {
        let law = BTreeMap::from([(1, 0.5), (2, 0.25), (3, 0.125), (4, 0.125)]);
        assert_eq!(escape_mass(&law, 1), 0.25);
        assert_eq!(escape_mass(&law, 2), 0.125);
        assert_eq!(escape_mass(&law, 3), 0.0);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Failure::Usage(String::new()).code(), 2);
        assert_eq!(Failure::Verification(String::new()).code(), 3);
        assert_eq!(Failure::SelfCheck(String::new()).code(), 4);
    }
}
