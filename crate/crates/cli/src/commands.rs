use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use indexmap::IndexMap;

use ranksig_core::compare::{association, crosstab, spearman, z_by_country, z_distribution_series, Labeling};
use ranksig_core::dynamics::{bootstrap_all, decompose_change};
use ranksig_core::ingest::write_records;
use ranksig_core::siggraph::{build_graph, cluster, modularity, rank_groups, weak_components};
use ranksig_core::stats::{link_z, pairwise_test, two_by_two};
use ranksig_core::{Criterion, Grouping, NodeScore, ProportionMode, SignificanceGraph, SignificanceLevel};

use crate::args::{
    BootstrapArgs, CompareArgs, DecomposeArgs, ExportArgs, GraphOptions, GroupArgs, Method, PairwiseArgs, Selection,
    ZcurveArgs,
};
use crate::export::write_graph;
use crate::failure::{Failure, Outcome};
use crate::input;
use crate::report::{PairwiseReport, Style};

/// Writes to `path`, or to stdout when absent.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Outcome<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Failure::usage(format!("cannot write `{}`: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn threshold(alpha: f64) -> Outcome<f64> {
    let level = SignificanceLevel::from_alpha(alpha)?;
    Ok(level.z_threshold().expect("from_alpha never yields NotSignificant"))
}

pub fn pairwise(args: &PairwiseArgs) -> Outcome<()> {
    let records = input::records(&args.selection)?;
    let a = input::find(&records, &args.first)?;
    let b = input::find(&records, &args.second)?;
    let test = pairwise_test(a, b, args.proportions.into())?;
    let table = two_by_two(a, b)?;
    let z_of = |mode| if a == b { Ok(0.0) } else { link_z(a, b, mode) };
    let report = PairwiseReport {
        context: input::selector(&args.selection).to_string(),
        table: &table,
        test: &test,
        z_stored: z_of(ProportionMode::Stored)?,
        z_exact: z_of(ProportionMode::Exact)?,
    };
    let text = report.render(Style::detect(args.out.is_some()));
    emit(args.out.as_deref(), text.as_bytes())
}

/// The significance graph from either a record file or node/link tables,
/// plus the node table when one was given.
fn graph(sel: &Selection, opts: &GraphOptions) -> Outcome<(SignificanceGraph, Option<Vec<NodeScore>>)> {
    let t = threshold(opts.alpha)?;
    let criterion: Criterion = opts.criterion.into();
    if let Some(spec) = &opts.nodes {
        if criterion != Criterion::ZTest {
            return Err(Failure::usage(
                "--criterion ci needs a record file with stability intervals",
            ));
        }
        let nodes = input::nodes(spec)?;
        let links = match &opts.links {
            Some(l) => input::links(l)?,
            None => Vec::new(),
        };
        let g = SignificanceGraph::from_scores(&nodes, &links, t)?;
        return Ok((g, Some(nodes)));
    }
    let records = input::records(sel)?;
    if records.len() < 2 {
        return Err(Failure::usage(format!(
            "grouping needs at least two institutions, the selection has {}",
            records.len()
        )));
    }
    Ok((build_graph(&records, criterion, t, opts.proportions.into())?, None))
}

pub fn group(args: &GroupArgs) -> Outcome<()> {
    let (g, nodes) = graph(&args.selection, &args.opts)?;
    let mut given: HashMap<usize, String> = HashMap::new();
    let grouping = match args.method {
        Method::Components => weak_components(&g),
        Method::Modularity => {
            if !(args.resolution.is_finite() && args.resolution > 0.0) {
                return Err(Failure::usage("--resolution must be positive"));
            }
            cluster(&g, args.resolution, args.seed)
        }
        Method::Given => {
            let nodes = nodes.ok_or_else(|| Failure::usage("--method given needs --nodes with a group column"))?;
            let labels: Vec<(&str, &str)> = nodes
                .iter()
                .map(|n| {
                    n.group
                        .as_deref()
                        .map(|grp| (n.name.as_str(), grp))
                        .ok_or_else(|| Failure::usage(format!("`{}` has no group", n.name)))
                })
                .collect::<Outcome<_>>()?;
            let grouping = Grouping::from_named(&g, labels.iter().copied())?;
            for (name, label) in &labels {
                let i = g.index_of(name).expect("node present");
                given.insert(grouping.group_of(i), label.to_string());
            }
            grouping
        }
    };

    let ranks = rank_groups(&g, &grouping);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["group", "name", "z", "overall_rank", "within_rank"])
        .map_err(csv_failure)?;
    for r in &ranks.rows {
        let label = given
            .get(&r.group)
            .cloned()
            .unwrap_or_else(|| grouping.tier_label(r.group));
        w.write_record([
            label,
            r.name.clone(),
            r.z.to_string(),
            r.overall_rank.to_string(),
            r.within_rank.to_string(),
        ])
        .map_err(csv_failure)?;
    }
    let table = w.into_inner().map_err(|e| Failure::Internal(e.to_string()))?;
    emit(args.out.as_deref(), &table)?;

    if let Some(path) = &args.graph {
        let mut buf = Vec::new();
        write_graph(args.format, &g, Some(&grouping), &mut buf)?;
        emit(Some(path), &buf)?;
    }
    eprintln!(
        "{} institutions, {} edges, {} groups ({} isolates), modularity {:.4}",
        g.len(),
        g.edges().len(),
        grouping.len(),
        grouping.len() - grouping.tier_count(),
        modularity(&g, &grouping, args.resolution)
    );
    Ok(())
}

fn csv_failure(e: csv::Error) -> Failure {
    Failure::Internal(e.to_string())
}

/// Tier order of each label: by the highest z among its members, labels
/// called `isolate`/`isolates` last.
fn tier_ordinals(labels: &Labeling, z: &HashMap<&str, f64>) -> HashMap<String, f64> {
    let mut best: IndexMap<&str, f64> = IndexMap::new();
    for (name, label) in labels {
        if let Some(&v) = z.get(name.as_str()) {
            let e = best.entry(label.as_str()).or_insert(f64::NEG_INFINITY);
            *e = e.max(v);
        }
    }
    let mut order: Vec<(&str, f64)> = best.into_iter().collect();
    let is_isolate = |l: &str| l.starts_with("isolate");
    order.sort_by(|a, b| {
        is_isolate(a.0)
            .cmp(&is_isolate(b.0))
            .then(b.1.total_cmp(&a.1))
            .then(a.0.cmp(b.0))
    });
    order
        .into_iter()
        .enumerate()
        .map(|(i, (l, _))| (l.to_string(), (i + 1) as f64))
        .collect()
}

pub fn compare(args: &CompareArgs) -> Outcome<()> {
    let left = input::labeling(&args.left, args.column.as_deref())?;
    let right = input::labeling(&args.right, args.column.as_deref())?;
    let assoc = association(crosstab(&left, &right)?)?;
    let ct = &assoc.crosstab;

    let mut out = String::new();
    let width = ct.rows.iter().map(String::len).max().unwrap_or(0).max(5);
    let _ = write!(out, "{:width$}", "");
    for c in &ct.cols {
        let _ = write!(out, " {c:>10}");
    }
    let _ = writeln!(out, " {:>10}", "total");
    for (label, row) in ct.rows.iter().zip(&ct.counts) {
        let _ = write!(out, "{label:width$}");
        for v in row {
            let _ = write!(out, " {v:>10}");
        }
        let _ = writeln!(out, " {:>10}", row.iter().sum::<u64>());
    }
    let _ = write!(out, "{:width$}", "total");
    for j in 0..ct.cols.len() {
        let _ = write!(out, " {:>10}", ct.counts.iter().map(|r| r[j]).sum::<u64>());
    }
    let _ = writeln!(out, " {:>10}\n", ct.total());
    let _ = writeln!(out, "institutions  {}", ct.total());
    let _ = writeln!(
        out,
        "chi-square    {:.2} (df = {}, {})",
        assoc.chi2, assoc.dof, assoc.level
    );
    let _ = writeln!(out, "Cramer's V    {:.4}", assoc.cramers_v);
    let _ = writeln!(out, "phi           {:.4}", assoc.phi);

    if let Some(spec) = &args.z {
        let nodes = input::nodes(spec)?;
        let z: HashMap<&str, f64> = nodes.iter().map(|n| (n.name.as_str(), n.z)).collect();
        let ordinals = tier_ordinals(&right, &z);
        let mut ranked: Vec<&NodeScore> = nodes.iter().filter(|n| right.contains_key(&n.name)).collect();
        ranked.sort_by(|a, b| b.z.total_cmp(&a.z).then_with(|| a.name.cmp(&b.name)));
        let xs: Vec<f64> = (1..=ranked.len()).map(|r| r as f64).collect();
        let ys: Vec<f64> = ranked.iter().map(|n| ordinals[&right[&n.name]]).collect();
        let rho = spearman(&xs, &ys)?;
        let _ = writeln!(out, "Spearman rho  {rho:.4} (z rank vs tier order, n = {})", xs.len());
    }
    emit(args.out.as_deref(), out.as_bytes())
}

pub fn decompose(args: &DecomposeArgs) -> Outcome<()> {
    let d = decompose_change(args.reported_old, args.reconstructed_old, args.current)?;
    let share = |s: Option<f64>| s.map_or("undefined".to_string(), |v| format!("{:.1}%", v * 100.0));
    let mut out = String::new();
    let _ = writeln!(out, "reported old       {:>10.4}", d.reported_old);
    let _ = writeln!(out, "reconstructed old  {:>10.4}", d.reconstructed_old);
    let _ = writeln!(out, "current            {:>10.4}", d.current);
    let _ = writeln!(out, "total change       {:>10.4}", d.total);
    let _ = writeln!(
        out,
        "data effect        {:>10.4}  {}",
        d.data_effect,
        share(d.data_share)
    );
    let _ = writeln!(
        out,
        "model effect       {:>10.4}  {}",
        d.model_effect,
        share(d.model_share)
    );
    emit(args.out.as_deref(), out.as_bytes())
}

pub fn bootstrap(args: &BootstrapArgs) -> Outcome<()> {
    let mut records = input::records(&args.selection)?;
    let intervals = bootstrap_all(&records, args.draws, args.coverage, args.seed)?;
    let mut buf = Vec::new();
    if args.as_records {
        for (r, si) in records.iter_mut().zip(&intervals) {
            r.ci_lower = Some(si.lower.min(r.pp_top10));
            r.ci_upper = Some(si.upper.max(r.pp_top10));
        }
        write_records(&records, &mut buf)?;
    } else {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut buf);
        w.write_record(["name", "point", "lower", "upper", "width", "draws", "coverage", "seed"])
            .map_err(csv_failure)?;
        for (r, si) in records.iter().zip(&intervals) {
            w.write_record([
                r.name.clone(),
                si.point.to_string(),
                si.lower.to_string(),
                si.upper.to_string(),
                si.width().to_string(),
                si.draws.to_string(),
                si.coverage.to_string(),
                si.seed.to_string(),
            ])
            .map_err(csv_failure)?;
        }
        w.flush()?;
    }
    emit(args.out.as_deref(), &buf)
}

pub fn zcurve(args: &ZcurveArgs) -> Outcome<()> {
    let groups: IndexMap<String, Vec<(String, f64)>> = match &args.nodes {
        Some(spec) => {
            let mut out: IndexMap<String, Vec<(String, f64)>> = IndexMap::new();
            for n in input::nodes(spec)? {
                let cat = n.category.clone().unwrap_or_else(|| "all".to_string());
                out.entry(cat).or_default().push((n.name, n.z));
            }
            out
        }
        None => z_by_country(&input::records(&args.selection)?)?,
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["category", "rank", "name", "z"]).map_err(csv_failure)?;
    for series in z_distribution_series(&groups) {
        for p in series.points {
            w.write_record([series.category.clone(), p.rank.to_string(), p.name, p.z.to_string()])
                .map_err(csv_failure)?;
        }
    }
    let buf = w.into_inner().map_err(|e| Failure::Internal(e.to_string()))?;
    emit(args.out.as_deref(), &buf)
}

pub fn export(args: &ExportArgs) -> Outcome<()> {
    let (g, _) = graph(&args.selection, &args.opts)?;
    let grouping = weak_components(&g);
    let mut buf = Vec::new();
    write_graph(args.format, &g, Some(&grouping), &mut buf)?;
    emit(args.out.as_deref(), &buf)
}
