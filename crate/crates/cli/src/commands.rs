use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use listgaze::gaze::{
    aggregate_metrics, compute_aoi_metrics, detect_fixations, metrics_to_csv, parse_gaze_csv, AggregateCell,
    FixationParams, GazeTrace, Grouping,
};
use listgaze::imaging::RasterImage;
use listgaze::saliency::{gbvs_saliency, itti_saliency, overlay, GbvsParams, IttiParams, Model, SaliencyMap, OVERLAY_ALPHA};
use listgaze::scoring::{aoi_saliency, outlier_rank, report_from_ranks, AoiSaliency};
use listgaze::stimulus::{bundled_corpus, build_stimulus, render, AoiLayout, Outlier, StimulusSpec};

use crate::config::{self, RunConfig};
use crate::manifest::{display_name, read_input, Manifest, OutDir};
use crate::{usage, AnalyzeGazeArgs, Cli, Command, GroupingArg, RenderArgs, SaliencyArgs, ScoreArgs};

pub fn run(cli: Cli) -> Result<()> {
    let loaded = config::load(&cli.global)?;
    if let Some(jobs) = loaded.config.jobs {
        if jobs == 0 {
            return Err(usage("--jobs must be at least 1"));
        }
        // fails only if a pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let ctx = Ctx { config: loaded.config, config_source: loaded.source, out: cli.global.out };
    match cli.command {
        Command::Render(args) => cmd_render(&ctx, &args),
        Command::Saliency(args) => cmd_saliency(&ctx, &args),
        Command::Score(args) => cmd_score(&ctx, &args),
        Command::AnalyzeGaze(args) => cmd_analyze_gaze(&ctx, &args),
        Command::Report(args) => crate::report::cmd_report(&ctx, &args),
    }
}

pub struct Ctx {
    pub config: RunConfig,
    config_source: Option<(String, Vec<u8>)>,
    pub out: PathBuf,
}

impl Ctx {
    /// Manifest seeded with the config file as an input, when one was given.
    pub fn manifest(&self, command: &str) -> Manifest {
        let mut m = Manifest::new(command, self.config.seed);
        if let Some((name, bytes)) = &self.config_source {
            m.input(format!("config:{name}"), bytes);
        }
        m
    }
}

fn stimulus_dir_name(spec: &StimulusSpec) -> String {
    match spec.outlier {
        Some(o) => format!("{}_{:02}", o.feature.name(), o.position),
        None => "no_outlier".to_string(),
    }
}

fn write_stimulus(dir: &mut OutDir, prefix: &str, spec: &StimulusSpec) -> Result<()> {
    let (image, layout) = render(spec)?;
    dir.write(&format!("{prefix}render.png"), &image.to_png_bytes()?)?;
    dir.write(&format!("{prefix}aoi.json"), format!("{}\n", layout.to_json()?).as_bytes())?;
    dir.write(&format!("{prefix}spec.json"), format!("{}\n", spec.to_json()?).as_bytes())?;
    Ok(())
}

fn cmd_render(ctx: &Ctx, args: &RenderArgs) -> Result<()> {
    let seed = ctx.config.seed;
    if args.corpus {
        let specs = bundled_corpus(seed)?;
        let mut dir = OutDir::create(&ctx.out, ctx.manifest("render --corpus"))?;
        dir.manifest.params = serde_json::json!({ "corpus": true, "stimuli": specs.len() });
        let rendered: Vec<_> = specs
            .par_iter()
            .map(|spec| -> Result<_> {
                let (image, layout) = render(spec)?;
                Ok((stimulus_dir_name(spec), image.to_png_bytes()?, layout.to_json()?, spec.to_json()?))
            })
            .collect::<Result<_>>()?;
        for (name, png, aoi, spec) in rendered {
            dir.write(&format!("{name}/render.png"), &png)?;
            dir.write(&format!("{name}/aoi.json"), format!("{aoi}\n").as_bytes())?;
            dir.write(&format!("{name}/spec.json"), format!("{spec}\n").as_bytes())?;
        }
        dir.finish()?;
        return Ok(());
    }
    let (spec, mut manifest) = match (&args.spec, &args.query) {
        (Some(path), _) => {
            let (bytes, name) = read_input(path)?;
            let text = String::from_utf8(bytes.clone()).context("spec is not UTF-8")?;
            let spec = StimulusSpec::from_json(&text).with_context(|| format!("invalid spec {}", path.display()))?;
            let mut m = ctx.manifest("render");
            m.input(name, &bytes);
            (spec, m)
        }
        (None, Some(query)) => {
            let outlier = args.feature.map(|f| Outlier {
                feature: f.into(),
                position: args.position,
                magnitude: args.magnitude.into(),
            });
            let spec = build_stimulus(query, outlier, seed)?;
            (spec, ctx.manifest("render --query"))
        }
        (None, None) => return Err(usage("render needs a SPEC file, --query or --corpus")),
    };
    manifest.seed = spec.seed;
    manifest.params = serde_json::json!({ "query": spec.query, "outlier": spec.outlier });
    let mut dir = OutDir::create(&ctx.out, manifest)?;
    write_stimulus(&mut dir, "", &spec)?;
    dir.finish()?;
    Ok(())
}

#[derive(Serialize)]
#[serde(untagged)]
enum ModelParams {
    Itti(IttiParams),
    Gbvs(GbvsParams),
}

fn compute_map(image: &RasterImage, params: &ModelParams) -> Result<SaliencyMap> {
    Ok(match params {
        ModelParams::Itti(p) => itti_saliency(image, p)?,
        ModelParams::Gbvs(p) => gbvs_saliency(image, p)?,
    })
}

fn cmd_saliency(ctx: &Ctx, args: &SaliencyArgs) -> Result<()> {
    let model: Model = args.model.into();
    let (params, params_input) = match (&args.params, model) {
        (Some(path), Model::Itti) => {
            let (p, name, bytes) = config::read_params::<IttiParams>(path)?;
            (ModelParams::Itti(p), Some((name, bytes)))
        }
        (Some(path), Model::Gbvs) => {
            let (p, name, bytes) = config::read_params::<GbvsParams>(path)?;
            (ModelParams::Gbvs(p), Some((name, bytes)))
        }
        (None, Model::Itti) => (ModelParams::Itti(ctx.config.itti.clone()), None),
        (None, Model::Gbvs) => (ModelParams::Gbvs(ctx.config.gbvs.clone()), None),
    };

    // one output directory per image: `--out` itself for a single input,
    // `--out/<parent>/<model>` for several
    let targets: Vec<(PathBuf, PathBuf)> = if args.images.len() == 1 {
        vec![(args.images[0].clone(), ctx.out.clone())]
    } else {
        let mut seen = BTreeSet::new();
        args.images
            .iter()
            .map(|img| {
                let parent = img
                    .parent()
                    .and_then(Path::file_name)
                    .ok_or_else(|| usage(format!("{} has no parent directory name", img.display())))?;
                if !seen.insert(parent.to_owned()) {
                    return Err(usage(format!("two inputs share the directory name {}", parent.to_string_lossy())));
                }
                Ok((img.clone(), ctx.out.join(parent).join(model.name())))
            })
            .collect::<Result<_>>()?
    };

    targets.par_iter().try_for_each(|(image_path, out)| -> Result<()> {
        let (bytes, name) = read_input(image_path)?;
        let image = RasterImage::from_png_bytes(&bytes).with_context(|| format!("decoding {}", image_path.display()))?;
        let map = compute_map(&image, &params).with_context(|| format!("{} saliency of {}", model, image_path.display()))?;
        let mut manifest = ctx.manifest(&format!("saliency --model {model}"));
        manifest.input(name, &bytes);
        manifest.params = serde_json::json!({ "model": model, "model_params": &params, "overlay_alpha": OVERLAY_ALPHA });
        match &params_input {
            Some((pname, pbytes)) => manifest.input(format!("params:{pname}"), pbytes),
            None if ctx.config_source.is_some() => manifest.note("model parameters taken from the config file"),
            None => manifest.note("no params file given; default model parameters used"),
        }
        let mut dir = OutDir::create(out, manifest)?;
        dir.write("map.png", &map.to_png16_bytes()?)?;
        dir.write("map.f32", &map.to_f32_bytes())?;
        dir.write("overlay.png", &overlay(&image, &map, OVERLAY_ALPHA)?.to_png_bytes()?)?;
        dir.finish()?;
        Ok(())
    })
}

/// Per-stimulus, per-model scoring record.
#[derive(Debug, Serialize)]
struct StimulusScores {
    stimulus: String,
    model: Model,
    outlier: Option<Outlier>,
    rank: Option<usize>,
    aois: Vec<AoiSaliency>,
}

struct Loaded {
    name: String,
    spec: StimulusSpec,
    layout: AoiLayout,
    maps: Vec<(Model, SaliencyMap, String, Vec<u8>)>,
    inputs: Vec<(String, Vec<u8>)>,
}

fn load_stimulus_dir(dir: &Path, models: &[Model]) -> Result<Loaded> {
    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| display_name(dir));
    let (spec_bytes, _) = read_input(&dir.join("spec.json"))?;
    let spec = StimulusSpec::from_json(std::str::from_utf8(&spec_bytes).context("spec.json is not UTF-8")?)
        .with_context(|| format!("invalid {}", dir.join("spec.json").display()))?;
    let (aoi_bytes, _) = read_input(&dir.join("aoi.json"))?;
    let layout = AoiLayout::from_json(std::str::from_utf8(&aoi_bytes).context("aoi.json is not UTF-8")?)
        .with_context(|| format!("invalid {}", dir.join("aoi.json").display()))?;
    let mut maps = Vec::new();
    for &model in models {
        let path = dir.join(model.name()).join("map.f32");
        if !path.exists() {
            continue;
        }
        let (bytes, _) = read_input(&path)?;
        let map = SaliencyMap::from_f32_bytes(&bytes).with_context(|| format!("invalid {}", path.display()))?;
        maps.push((model, map, format!("{name}/{}/map.f32", model.name()), bytes));
    }
    Ok(Loaded {
        inputs: vec![(format!("{name}/aoi.json"), aoi_bytes), (format!("{name}/spec.json"), spec_bytes)],
        name,
        spec,
        layout,
        maps,
    })
}

fn cmd_score(ctx: &Ctx, args: &ScoreArgs) -> Result<()> {
    let k = args.k.unwrap_or(ctx.config.k);
    if k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    let explicit = !args.model.is_empty();
    let models: Vec<Model> = if explicit {
        args.model.iter().map(|m| (*m).into()).collect::<BTreeSet<_>>().into_iter().collect()
    } else {
        vec![Model::Itti, Model::Gbvs]
    };
    let loaded: Vec<Loaded> = args.dirs.iter().map(|d| load_stimulus_dir(d, &models)).collect::<Result<_>>()?;
    let mut names = BTreeSet::new();
    for l in &loaded {
        if !names.insert(l.name.clone()) {
            return Err(usage(format!("duplicate stimulus directory name {}", l.name)));
        }
        if explicit && l.maps.len() != models.len() {
            return Err(usage(format!("{} lacks a map for a requested model", l.name)));
        }
        if l.maps.is_empty() {
            return Err(usage(format!("{} holds no saliency map", l.name)));
        }
    }

    let mut manifest = ctx.manifest("score");
    manifest.params = serde_json::json!({ "k": k, "models": models, "ranking": "mean saliency, z-normalized within AOI kind" });
    let mut records = Vec::new();
    let mut ranks = Vec::new();
    for l in &loaded {
        for (name, bytes) in &l.inputs {
            manifest.input(name.clone(), bytes);
        }
        for (model, map, name, bytes) in &l.maps {
            manifest.input(name.clone(), bytes);
            let aois = aoi_saliency(map, &l.layout).with_context(|| format!("scoring {}", name))?;
            let rank = match l.spec.outlier {
                Some(o) => {
                    let r = outlier_rank(&l.spec, &aois)?;
                    ranks.push((*model, o.feature, o.position, r));
                    Some(r)
                }
                None => None,
            };
            records.push(StimulusScores { stimulus: l.name.clone(), model: *model, outlier: l.spec.outlier, rank, aois });
        }
    }
    let detection = report_from_ranks(ranks, k);
    let mut dir = OutDir::create(&ctx.out, manifest)?;
    dir.write_json("scores.json", &records)?;
    dir.write_json("detection.json", &detection)?;
    dir.finish()?;
    Ok(())
}

#[derive(Serialize)]
struct AggregateTable {
    grouping: Grouping,
    cells: Vec<AggregateCell>,
}

fn aggregate_csv(tables: &[AggregateTable]) -> String {
    let fmt = |v: Option<f64>| v.map_or_else(String::new, |v| format!("{v:.3}"));
    let mut out = String::from("grouping,group,metric,mean,median,n,coverage\n");
    for t in tables {
        let g = grouping_name(&t.grouping);
        for c in &t.cells {
            out.push_str(&format!(
                "{g},{},{},{},{},{},{}\n",
                c.group,
                c.metric.name(),
                fmt(c.mean),
                fmt(c.median),
                c.n,
                c.coverage
            ));
        }
    }
    out
}

pub fn grouping_name(g: &Grouping) -> &'static str {
    match g {
        Grouping::Aoi => "aoi",
        Grouping::Kind => "kind",
        Grouping::Position => "position",
        Grouping::Neighborhood { .. } => "neighborhood",
    }
}

fn cmd_analyze_gaze(ctx: &Ctx, args: &AnalyzeGazeArgs) -> Result<()> {
    let mut requested: Vec<GroupingArg> = args.grouping.clone();
    if requested.is_empty() {
        requested.push(GroupingArg::Kind);
    }
    requested.dedup();
    let groupings: Vec<Grouping> = requested
        .iter()
        .map(|g| match g {
            GroupingArg::Aoi => Ok(Grouping::Aoi),
            GroupingArg::Kind => Ok(Grouping::Kind),
            GroupingArg::Position => Ok(Grouping::Position),
            GroupingArg::Neighborhood => match args.outlier_pos {
                Some(outlier) => Ok(Grouping::Neighborhood {
                    outlier,
                    distant: args.distant.into(),
                    kind: args.kind.map(Into::into),
                }),
                None => Err(usage("--grouping neighborhood requires --outlier-pos")),
            },
        })
        .collect::<Result<_>>()?;

    let params = FixationParams {
        dispersion: args.dispersion.unwrap_or(ctx.config.fixation.dispersion),
        min_duration: args.min_duration.unwrap_or(ctx.config.fixation.min_duration),
        ..ctx.config.fixation
    };
    if !(params.dispersion > 0.0 && params.dispersion.is_finite()) {
        return Err(usage("--dispersion must be a positive number"));
    }

    let (gaze_bytes, gaze_name) = read_input(&args.gaze_csv)?;
    let (aoi_bytes, aoi_name) = read_input(&args.aoi_json)?;
    let layout = AoiLayout::from_json(std::str::from_utf8(&aoi_bytes).context("AOI JSON is not UTF-8")?)
        .with_context(|| format!("invalid {}", args.aoi_json.display()))?;
    let traces = parse_gaze_csv(std::str::from_utf8(&gaze_bytes).context("gaze CSV is not UTF-8")?)
        .with_context(|| format!("reading {}", args.gaze_csv.display()))?;

    let metrics: Vec<GazeTrace<_>> = traces
        .par_iter()
        .map(|t| -> Result<_> {
            let fixations = detect_fixations(&t.items, &params)
                .with_context(|| format!("participant {} stimulus {}", t.participant, t.stimulus))?;
            let items = compute_aoi_metrics(&fixations, &layout)?;
            Ok(GazeTrace { participant: t.participant, stimulus: t.stimulus, items })
        })
        .collect::<Result<_>>()?;
    let per_participant: Vec<Vec<_>> = metrics.iter().map(|t| t.items.clone()).collect();
    let tables: Vec<AggregateTable> = groupings
        .iter()
        .map(|g| Ok(AggregateTable { grouping: *g, cells: aggregate_metrics(&per_participant, g)? }))
        .collect::<Result<_>>()?;

    let mut manifest = ctx.manifest("analyze-gaze");
    manifest.input(gaze_name, &gaze_bytes);
    manifest.input(aoi_name, &aoi_bytes);
    manifest.params = serde_json::json!({ "fixation": params, "groupings": groupings });
    manifest.note(format!("{} traces", metrics.len()));
    let mut dir = OutDir::create(&ctx.out, manifest)?;
    dir.write("metrics.csv", metrics_to_csv(&metrics)?.as_bytes())?;
    dir.write_json("metrics.json", &metrics)?;
    dir.write("aggregate.csv", aggregate_csv(&tables).as_bytes())?;
    dir.write_json("aggregate.json", &tables)?;
    dir.finish()?;
    Ok(())
}
