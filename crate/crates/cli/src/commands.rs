use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;

use rough_metric::lab::{lipschitz_witness_search, run_convergence, write_csv, Experiment, SampleSpec, WitnessRecord};
use rough_metric::{
    distance as solve, ConformalMetric, Direction, FamilyId, Geodesic, LimitKind, MetricFamily, PairSample, Regime,
};

use crate::args::{ConvergeArgs, DistanceArgs, ExportArgs, FamilyArgs, FileConfig, Format, Strategy, WitnessArgs};
use crate::UsageError;

const DEFAULT_SAMPLES: usize = 100;
const DEFAULT_SEED: u64 = 0;

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn resolve_family(args: &FamilyArgs, file: &FileConfig) -> anyhow::Result<MetricFamily> {
    let name = args
        .family
        .clone()
        .or_else(|| file.family.clone())
        .ok_or_else(|| usage("--family is required"))?;
    let regime = args
        .regime
        .clone()
        .or_else(|| file.regime.clone())
        .map(|r| r.parse::<Regime>())
        .transpose()?;
    let id = if name == "dyadic" {
        FamilyId::dyadic(regime.ok_or_else(|| usage("family `dyadic` needs --regime"))?)
    } else {
        let id: FamilyId = name.parse()?;
        if let Some(r) = regime {
            if id.regime() != Some(r) {
                return Err(usage(format!("--regime does not apply to family `{id}`")));
            }
        }
        id
    };
    Ok(MetricFamily::new(id, args.alpha.or(file.alpha).unwrap_or(1.0))?)
}

fn resolve_index(family: &MetricFamily, flag: Option<u32>, file: &FileConfig) -> anyhow::Result<u32> {
    match flag.or(file.index) {
        Some(index) => Ok(index),
        None if !family.id().is_indexed() => Ok(0),
        None => Err(usage(format!("--index is required for `{}`", family.name()))),
    }
}

fn build_member(family: &MetricFamily, index: u32, args: &FamilyArgs, file: &FileConfig) -> anyhow::Result<ConformalMetric> {
    Ok(family.build_with(index, args.force || file.force.unwrap_or(false))?)
}

/// Write every file or none: each goes to a sibling `.partial` file first
/// and is renamed into place; on any error the files of this call are removed.
fn write_all(files: &[(PathBuf, Vec<u8>)]) -> anyhow::Result<()> {
    let mut done: Vec<&Path> = Vec::new();
    for (path, bytes) in files {
        let mut partial = path.clone().into_os_string();
        partial.push(".partial");
        let partial = PathBuf::from(partial);
        let result = fs::write(&partial, bytes).and_then(|()| fs::rename(&partial, path));
        if let Err(e) = result {
            let _ = fs::remove_file(&partial);
            for p in done {
                let _ = fs::remove_file(p);
            }
            return Err(e).with_context(|| format!("cannot write {}", path.display()));
        }
        done.push(path);
    }
    Ok(())
}

pub fn distance(args: &DistanceArgs, file: &FileConfig) -> anyhow::Result<()> {
    let metric = match &args.metric {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read metric {}: {e}", path.display())))?;
            ConformalMetric::from_json(&text)?
        }
        None => {
            let family = resolve_family(&args.family, file)?;
            let index = resolve_index(&family, args.index, file)?;
            build_member(&family, index, &args.family, file)?
        }
    };
    let cfg = args.solver.resolve(&file.solver);
    let result = solve(&metric, args.p, args.q, &cfg)?;
    println!("{}", serde_json::to_string(&result)?);
    Ok(())
}

fn has_lines(m: &ConformalMetric) -> bool {
    m.partition().x_cuts().len() > 2 || m.partition().y_cuts().len() > 2 || !m.features().is_empty()
}

fn sample_spec(
    strategy: Strategy,
    samples: usize,
    seed: u64,
    family: &MetricFamily,
    indices: &[u32],
    force: bool,
) -> anyhow::Result<SampleSpec> {
    Ok(match strategy {
        Strategy::Random => SampleSpec::Random { count: samples, seed },
        Strategy::Grid => SampleSpec::UniformGrid { side: samples },
        Strategy::Feature => SampleSpec::FeatureAdjacent { count: samples, seed },
        Strategy::Witnesses => SampleSpec::PaperWitnesses,
        Strategy::Mixed => {
            let mut parts = vec![SampleSpec::Random { count: samples, seed }];
            let mut lines = true;
            for &index in indices {
                lines &= has_lines(&family.build_with(index, force)?);
            }
            if lines {
                parts.push(SampleSpec::FeatureAdjacent { count: (samples / 2).max(1), seed: seed.wrapping_add(1) });
            }
            if indices.iter().all(|&i| !family.witnesses(i).is_empty()) {
                parts.push(SampleSpec::PaperWitnesses);
            }
            SampleSpec::Mixed { parts }
        }
    })
}

pub fn converge(args: &ConvergeArgs, file: &FileConfig) -> anyhow::Result<()> {
    let family = resolve_family(&args.family, file)?;
    let indices = if !args.index.is_empty() {
        args.index.clone()
    } else if let Some(list) = file.indices.clone().or_else(|| file.index.map(|i| vec![i])) {
        list
    } else {
        return Err(usage("--index is required (comma separated list)"));
    };
    let base = args.base.clone().or_else(|| file.base.clone()).map(|b| b.parse::<LimitKind>()).transpose()?;
    let out = args.out.clone().or_else(|| file.out.clone()).ok_or_else(|| usage("--out is required"))?;
    let format = args.format.or(file.format).unwrap_or(Format::Both);
    let force = args.family.force || file.force.unwrap_or(false);
    let strategy = args.strategy.or(file.strategy).unwrap_or(Strategy::Mixed);
    let samples = args.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES);
    let seed = args.seed.or(file.seed).unwrap_or(DEFAULT_SEED);

    let exp = Experiment {
        sample: sample_spec(strategy, samples, seed, &family, &indices, force)?,
        family,
        indices,
        base,
        solver: args.solver.resolve(&file.solver),
        force,
    };
    let run = run_convergence(&exp)?;
    let summary = serde_json::to_string_pretty(&run.summary)?;

    let mut files = Vec::new();
    if matches!(format, Format::Csv | Format::Both) {
        let mut csv = Vec::new();
        write_csv(&run.rows, &mut csv)?;
        files.push((out.with_extension("csv"), csv));
    }
    if matches!(format, Format::Json | Format::Both) {
        files.push((out.with_extension("json"), format!("{summary}\n").into_bytes()));
    }
    write_all(&files)?;
    println!("{summary}");
    Ok(())
}

pub fn witness(args: &WitnessArgs, file: &FileConfig) -> anyhow::Result<()> {
    let family = resolve_family(&args.family, file)?;
    let index = resolve_index(&family, args.index, file)?;
    let direction: Direction = args.direction.parse()?;
    if !(args.c.is_finite() && args.c > 0.0) {
        return Err(usage(format!("--c must be positive, got {}", args.c)));
    }
    let geodesic = Geodesic::new(build_member(&family, index, &args.family, file)?, args.solver.resolve(&file.solver))?;

    let explicit = args.samples.or(file.samples);
    let seed = args.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
    let mut candidates = PairSample::paper_witnesses(&family, index).ok();
    if candidates.is_none() || explicit.is_some() {
        let random = PairSample::random(explicit.unwrap_or(DEFAULT_SAMPLES), seed)?;
        match candidates.as_mut() {
            Some(c) => c.extend(&random),
            None => candidates = Some(random),
        }
    }
    let candidates = candidates.expect("candidates assigned above");

    let euclid = rough_metric::lab::AnalyticLimit(LimitKind::Euclidean);
    match lipschitz_witness_search(&geodesic, &euclid, args.c, direction, &candidates)? {
        Some(hit) => {
            let record = WitnessRecord {
                index,
                p: hit.p,
                q: hit.q,
                direction,
                c: args.c,
                d_metric: hit.d_metric,
                d_base: hit.d_base,
            };
            println!("{}", serde_json::to_string(&record)?);
        }
        None => println!("none"),
    }
    Ok(())
}

pub fn export(args: &ExportArgs, file: &FileConfig) -> anyhow::Result<()> {
    let family = resolve_family(&args.family, file)?;
    let index = resolve_index(&family, args.index, file)?;
    let json = build_member(&family, index, &args.family, file)?.to_json();
    match &args.out {
        Some(path) => write_all(&[(path.clone(), format!("{json}\n").into_bytes())]),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}
