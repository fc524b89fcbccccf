use serde::Serialize;

use sadim_core::condition::{certify_escalating, BufferCertificate, CertifyOptions};
use sadim_core::multilinear::{find_proximal_word, irreducibility_semidecision};
use sadim_core::pressure::{pressure_bracket, DEFAULT_LETTER_BUDGET};
use sadim_core::verify::{
    box_count, build_measure_tree, energy_partial_sum, points_csv, random_translations, sample_attractor, scatter_svg,
    word_len_for, EnergyReport, GrowthCheck, MeasureTree, Mode, Schedule, TreeNode,
};
use sadim_core::{
    gamma_bounds, pressure2_estimate, solve_affinity, solve_recurrence, solve_shrinking, AffineIFS, DimensionResult,
    Error, IrreducibilityVerdict, PressureBracket, ProximalityWitness, Rigor, Vector,
};

use crate::config::{field_error, ModeName, RunConfig, ScheduleSpec};
use crate::output::{label, num, Csv, Outputs, RunRecord};
use crate::{Cli, CliError, Command};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&cli.config).map_err(|e| CliError::Io(cli.config.display().to_string(), e))?;
    let mut cfg = RunConfig::parse(&text)?;
    resolve(&mut cfg, cli);
    let ifs = cfg.build_ifs()?;
    let out = Outputs::new(&cli.out)?;
    let ctx = Ctx { cfg: &cfg, ifs: &ifs, out: &out, command: cli.command };
    match cli.command {
        Command::Pressure => pressure(&ctx),
        Command::Alpha => alpha(&ctx),
        Command::DimAffinity => dimension(&ctx, solve_affinity(&ifs, &cfg.solver)?),
        Command::DimShrinking => dimension(&ctx, solve_shrinking(&ifs, cfg.target()?, &cfg.solver)?),
        Command::DimRecurrence => dimension(&ctx, solve_recurrence(&ifs, cfg.psi()?, &cfg.solver)?),
        Command::CertifyCondition => certify_condition(&ctx),
        Command::CheckMatrices => check_matrices(&ctx),
        Command::BuildMeasure => build_measure(&ctx),
        Command::Energy => energy(&ctx),
        Command::Sample => sample(&ctx),
        Command::Boxcount => boxcount(&ctx),
    }
}

/// Folds command-line overrides into the configuration that gets recorded.
fn resolve(cfg: &mut RunConfig, cli: &Cli) {
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(budget) = cli.budget {
        cfg.solver.budget = budget;
    }
    if cli.depth_escalate {
        cfg.solver.depth_escalate = true;
    }
    let seed = cfg.seed;
    for c in [cfg.certify.as_mut(), cfg.solver.certify.as_mut(), cfg.measure.as_mut().map(|m| &mut m.certify)]
        .into_iter()
        .flatten()
    {
        c.seed = seed;
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    ifs: &'a AffineIFS,
    out: &'a Outputs,
    command: Command,
}

impl Ctx<'_> {
    fn record<T: Serialize>(&self, result: T) -> Result<(), CliError> {
        self.out.record(&RunRecord {
            command: self.command.name(),
            version: sadim_core::VERSION,
            seed: self.cfg.seed,
            config: self.cfg,
            result,
        })
    }

    fn warn(&self, message: &str) {
        eprintln!("warning: {message}");
    }

    fn budget(&self) -> u128 {
        self.cfg.solver.budget
    }

    fn depth(&self) -> usize {
        self.cfg.depth.unwrap_or_else(|| {
            let mut n = 1;
            while n < self.cfg.solver.max_depth && (self.ifs.n_maps() as u128).pow(n as u32 + 1) <= self.budget() {
                n += 1;
            }
            n
        })
    }

    fn certificate(&self, s: f64) -> Result<Option<BufferCertificate>, CliError> {
        match &self.cfg.certify {
            None => Ok(None),
            Some(opts) => Ok(Some(certify_escalating(self.ifs, s, opts)?)),
        }
    }
}

#[derive(Serialize)]
struct PressureResult {
    pressure: Vec<PressureBracket>,
    pressure2: Vec<PressureBracket>,
    certificates: Vec<BufferCertificate>,
}

fn pressure(ctx: &Ctx) -> Result<(), CliError> {
    let n = ctx.depth();
    let mut result = PressureResult { pressure: Vec::new(), pressure2: Vec::new(), certificates: Vec::new() };
    let mut csv = Csv::new(&["t", "depth", "lower", "upper", "rigor", "p2_lower", "p2_upper", "p2_rigor"]);
    for t in ctx.cfg.grid()? {
        let cert = ctx.certificate(t)?;
        let p = pressure_bracket(ctx.ifs, t, n, cert.as_ref(), ctx.budget())?;
        let p2 = pressure2_estimate(ctx.ifs, t, n, cert.as_ref(), ctx.budget())?;
        csv.row(&[num(t), n.to_string(), num(p.lower), num(p.upper), label(&p.rigor), num(p2.lower), num(p2.upper), label(&p2.rigor)]);
        result.pressure.push(p);
        result.pressure2.push(p2);
        result.certificates.extend(cert);
    }
    ctx.out.write("summary.csv", &csv.finish())?;
    ctx.record(result)
}

fn alpha(ctx: &Ctx) -> Result<(), CliError> {
    let spec = ctx.cfg.target()?;
    let opts = &ctx.cfg.solver;
    let k_max = spec.available().map_or(opts.k_max, |n| n.min(opts.k_max));
    let k_burn = opts.k_burn.unwrap_or(k_max / 2).clamp(1, k_max.max(1));
    let profile = sadim_core::pressure::TargetProfile::build(ctx.ifs, spec, k_burn, k_max, DEFAULT_LETTER_BUDGET)?;
    let mut csv = Csv::new(&["t", "value", "argmin_k", "k_burn", "k_max", "trend", "decreasing_tail", "closed_form", "rigor"]);
    let mut estimates = Vec::new();
    for t in ctx.cfg.grid()? {
        let a = sadim_core::pressure::alpha_from_profile(ctx.ifs, spec, &profile, t);
        if a.decreasing_tail {
            ctx.warn(&format!("α terms at t = {t} are still decreasing at k_max = {k_max}; the estimate may be too high"));
        }
        csv.row(&[
            num(t),
            num(a.value),
            a.argmin_k.to_string(),
            a.k_burn.to_string(),
            a.k_max.to_string(),
            num(a.trend),
            a.decreasing_tail.to_string(),
            a.closed_form.map(num).unwrap_or_default(),
            label(&a.rigor),
        ]);
        estimates.push(a);
    }
    ctx.out.write("summary.csv", &csv.finish())?;
    ctx.record(estimates)
}

fn dimension(ctx: &Ctx, r: DimensionResult) -> Result<(), CliError> {
    for w in &r.diagnostics.warnings {
        ctx.warn(w);
    }
    let mut csv = Csv::new(&["quantity", "lo", "hi", "reported", "positive_lebesgue", "rigor", "converged", "depth"]);
    csv.row(&[
        label(&r.quantity),
        num(r.root_bracket[0]),
        num(r.root_bracket[1]),
        num(r.reported),
        r.positive_lebesgue.to_string(),
        label(&r.rigor),
        r.converged.to_string(),
        r.diagnostics.depths.last().map(|d| d.to_string()).unwrap_or_default(),
    ]);
    ctx.out.write("summary.csv", &csv.finish())?;
    ctx.record(r)
}

fn certify_condition(ctx: &Ctx) -> Result<(), CliError> {
    let opts = ctx.cfg.certify.clone().unwrap_or_else(|| CertifyOptions { seed: ctx.cfg.seed, ..CertifyOptions::default() });
    let mut csv = Csv::new(&["s", "k", "c_hat", "tested_len", "sampled_pairs", "label", "id"]);
    let mut certs = Vec::new();
    for s in ctx.cfg.grid()? {
        let c = certify_escalating(ctx.ifs, s, &opts)?;
        csv.row(&[num(s), c.k.to_string(), num(c.c_hat), c.tested_len.to_string(), c.sampled_pairs.to_string(), c.label.clone(), c.id.clone()]);
        certs.push(c);
    }
    ctx.out.write("summary.csv", &csv.finish())?;
    ctx.record(certs)
}

#[derive(Serialize)]
struct DegreeVerdict {
    k: usize,
    verdict: IrreducibilityVerdict,
}

#[derive(Serialize)]
struct MatrixReport {
    d: usize,
    n_maps: usize,
    gamma_min: f64,
    gamma_max: f64,
    contractive_half: bool,
    warnings: Vec<String>,
    /// `"found"` or `"none found"` up to `max_len`.
    proximality: String,
    proximality_max_len: usize,
    witness: Option<ProximalityWitness>,
    irreducibility: Vec<DegreeVerdict>,
    rigor: &'static str,
}

fn check_matrices(ctx: &Ctx) -> Result<(), CliError> {
    let check = &ctx.cfg.check;
    let ifs = ctx.ifs;
    let g = gamma_bounds(ifs);
    let witness = find_proximal_word(ifs, check.proximal_len, check.tol, ctx.budget())?;
    let irreducibility = (1..ifs.dim())
        .map(|k| Ok(DegreeVerdict { k, verdict: irreducibility_semidecision(ifs, k, check.orbit_len)? }))
        .collect::<Result<Vec<_>, Error>>()?;
    for w in ifs.warnings() {
        ctx.warn(w);
    }
    let mut csv = Csv::new(&["check", "degree", "outcome"]);
    csv.row(&["proximality".into(), String::new(), if witness.is_some() { "found".into() } else { "none found".into() }]);
    for v in &irreducibility {
        csv.row(&["irreducibility".into(), v.k.to_string(), label(&v.verdict)]);
    }
    ctx.out.write("summary.csv", &csv.finish())?;
    ctx.record(MatrixReport {
        d: ifs.dim(),
        n_maps: ifs.n_maps(),
        gamma_min: g.gamma_min,
        gamma_max: g.gamma_max,
        contractive_half: ifs.contractive_half(),
        warnings: ifs.warnings().to_vec(),
        proximality: if witness.is_some() { "found" } else { "none found" }.into(),
        proximality_max_len: check.proximal_len,
        witness,
        irreducibility,
        rigor: "numerical",
    })
}

fn tree(ctx: &Ctx) -> Result<(MeasureTree, BufferCertificate), CliError> {
    let m = ctx.cfg.measure()?;
    let s = m.s.0;
    let cert = certify_escalating(ctx.ifs, s, &m.certify)?;
    let mode = match m.mode {
        ModeName::Shrinking => Mode::ShrinkingTarget { target: ctx.cfg.target()?.clone() },
        ModeName::Recurrence => Mode::Recurrence { psi: ctx.cfg.psi()?.clone() },
    };
    let schedule = match &m.schedule {
        ScheduleSpec::Named(name) if name == "none" => Schedule::empty(m.p, cert.k),
        ScheduleSpec::Named(name) if name == "clipped" => Schedule::clipped(&mode, m.p, cert.k, m.depth)?,
        ScheduleSpec::Named(other) => {
            return Err(field_error("measure.schedule", format!("expected \"none\", \"clipped\" or a list of shifts, got \"{other}\"")).into())
        }
        ScheduleSpec::Positions(p) => Schedule::from_positions(p.clone(), m.p, cert.k)?,
    };
    Ok((build_measure_tree(ctx.ifs, s, m.p, m.depth, mode, &cert, schedule, ctx.budget())?, cert))
}

#[derive(Serialize)]
struct LevelSummary {
    level: usize,
    words: usize,
    weight_sum: f64,
    block_start: usize,
    block_len: usize,
    forced: bool,
}

#[derive(Serialize)]
struct MeasureResult {
    s: f64,
    p: usize,
    k: usize,
    schedule: Schedule,
    unreached: Vec<usize>,
    growth: Vec<GrowthCheck>,
    certificate: BufferCertificate,
    partition_defect: f64,
    levels: Vec<LevelSummary>,
    nodes: Vec<TreeNode>,
    rigor: Rigor,
}

fn level_summaries(tree: &MeasureTree) -> Vec<LevelSummary> {
    tree.levels
        .iter()
        .enumerate()
        .map(|(level, l)| LevelSummary {
            level,
            words: l.words.len(),
            weight_sum: l.weight_sum(),
            block_start: l.block_start,
            block_len: l.block_len,
            forced: l.forced,
        })
        .collect()
}

fn build_measure(ctx: &Ctx) -> Result<(), CliError> {
    let (tree, cert) = tree(ctx)?;
    if tree.growth.iter().any(|g| !g.sum_condition || !g.spacing_condition) {
        ctx.warn("schedule violates the growth condition at some position; see result.json");
    }
    let levels = level_summaries(&tree);
    let mut csv = Csv::new(&["level", "words", "weight_sum", "block_start", "block_len", "forced"]);
    for l in &levels {
        csv.row(&[l.level.to_string(), l.words.to_string(), num(l.weight_sum), l.block_start.to_string(), l.block_len.to_string(), l.forced.to_string()]);
    }
    ctx.out.write("summary.csv", &csv.finish())?;
    ctx.record(MeasureResult {
        s: tree.s,
        p: tree.p,
        k: tree.k,
        schedule: tree.schedule.clone(),
        unreached: tree.unreached.clone(),
        growth: tree.growth.clone(),
        certificate: cert,
        partition_defect: tree.max_partition_defect(),
        levels,
        nodes: tree.nodes(),
        rigor: Rigor::Heuristic,
    })
}

fn energy(ctx: &Ctx) -> Result<(), CliError> {
    let (tree, _) = tree(ctx)?;
    let n_max = ctx.cfg.energy()?.n_max.unwrap_or(tree.depth());
    let mut reports: Vec<EnergyReport> = Vec::new();
    let mut csv = Csv::new(&["t", "level", "term", "log_term", "diverging"]);
    for t in ctx.cfg.energy_grid()? {
        if t >= tree.s {
            ctx.warn(&format!("t = {t} is not below s = {}; the terms need not decay", tree.s));
        }
        let r = energy_partial_sum(&tree, t, n_max)?;
        if r.diverging {
            ctx.warn(&format!("energy terms at t = {t} look divergent"));
        }
        for (level, (term, log)) in r.terms.iter().zip(&r.log_terms).enumerate() {
            csv.row(&[num(t), level.to_string(), num(*term), num(*log), r.diverging.to_string()]);
        }
        reports.push(r);
    }
    ctx.out.write("summary.csv", &csv.finish())?;
    ctx.record(reports)
}

fn points(ctx: &Ctx) -> Result<(Vec<Vector>, Vec<Vector>, usize), CliError> {
    let cfg = &ctx.cfg.sample;
    if cfg.n_points == 0 {
        return Err(field_error("sample.n_points", "must be positive").into());
    }
    if !(cfg.resolution > 0.0 && cfg.resolution < 1.0) {
        return Err(field_error("sample.resolution", "must lie in (0, 1)").into());
    }
    let translations = if cfg.random_translations {
        random_translations(ctx.ifs.n_maps(), ctx.ifs.dim(), ctx.cfg.seed)
    } else {
        ctx.ifs.translations().to_vec()
    };
    let word_len = cfg.word_len.unwrap_or_else(|| word_len_for(ctx.ifs, cfg.resolution));
    let pts = sample_attractor(ctx.ifs, &translations, cfg.n_points, word_len, ctx.cfg.seed)?;
    ctx.out.write("points.csv", &points_csv(&pts))?;
    if let Some(svg) = scatter_svg(&pts) {
        ctx.out.write("scatter.svg", &svg)?;
    }
    Ok((pts, translations, word_len))
}

#[derive(Serialize)]
struct SampleResult {
    n_points: usize,
    word_len: usize,
    translations: Vec<Vec<f64>>,
    bounding_box: Vec<[f64; 2]>,
    rigor: Rigor,
}

fn bounding_box(pts: &[Vector]) -> Vec<[f64; 2]> {
    let d = pts.first().map_or(0, |p| p.len());
    (0..d)
        .map(|i| {
            let lo = pts.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min);
            let hi = pts.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max);
            [lo, hi]
        })
        .collect()
}

fn sample(ctx: &Ctx) -> Result<(), CliError> {
    let (pts, translations, word_len) = points(ctx)?;
    let bbox = bounding_box(&pts);
    let mut csv = Csv::new(&["n_points", "word_len", "d"]);
    csv.row(&[pts.len().to_string(), word_len.to_string(), bbox.len().to_string()]);
    ctx.out.write("summary.csv", &csv.finish())?;
    ctx.record(SampleResult {
        n_points: pts.len(),
        word_len,
        translations: translations.iter().map(|t| t.iter().copied().collect()).collect(),
        bounding_box: bbox,
        rigor: Rigor::Heuristic,
    })
}

#[derive(Serialize)]
struct BoxResult {
    n_points: usize,
    word_len: usize,
    #[serde(flatten)]
    count: sadim_core::verify::BoxCount,
    rigor: Rigor,
}

fn boxcount(ctx: &Ctx) -> Result<(), CliError> {
    let (pts, _, word_len) = points(ctx)?;
    let epsilons = match ctx.cfg.epsilons() {
        Some(e) => e,
        None => {
            let span = bounding_box(&pts).iter().map(|b| b[1] - b[0]).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
            (2..=8).map(|k| span * 0.5f64.powi(k)).collect()
        }
    };
    let count = box_count(&pts, &epsilons)?;
    if count.undersampled {
        ctx.warn("fewer than 1000 points; the slope is unreliable");
    }
    let mut csv = Csv::new(&["epsilon", "count"]);
    for (e, c) in count.epsilons.iter().zip(&count.counts) {
        csv.row(&[num(*e), c.to_string()]);
    }
    ctx.out.write("summary.csv", &csv.finish())?;
    ctx.record(BoxResult { n_points: pts.len(), word_len, count, rigor: Rigor::Heuristic })
}
