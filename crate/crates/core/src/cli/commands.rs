use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::config::{Command, RunConfig};
use super::heatmap::{heatmap_svg, HeatmapData};
use crate::autodiff::{gradcheck, Tensor};
use crate::error::{Error, Result};
use crate::experiments::output::{append_loss, append_summary, append_trace, SUMMARY_HEADER, TRACE_HEADER};
use crate::experiments::{
    run_harmonics, run_robustness, run_sinusoids, HarmonicsConfig, RobustnessConfig, SinusoidConfig, SinusoidRun,
};
use crate::kernels::{empirical_ntk, DotProductKernel, UnitVector};
use crate::networks::{
    build, build_with_stream, load_checkpoint, save_checkpoint, ActivationPlacement, Architecture, Network,
    NetworkSpec, Optimizer,
};
use crate::rng::{Purpose, SeedStream};
use crate::specfun::lambda0_kk;
use crate::spectral::{compute_spectrum, decay_slope_fit, least_squares, ClassFilter, HarmonicSpectrum, QuadratureSpec};

/// What a subcommand produced: text for stdout and the files it wrote.
#[derive(Debug, Default)]
pub struct Report {
    pub stdout: String,
    pub files: Vec<PathBuf>,
}

struct Writer<'a> {
    cfg: &'a RunConfig,
    report: Report,
}

impl<'a> Writer<'a> {
    fn new(cfg: &'a RunConfig) -> Result<Self> {
        std::fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::io(&cfg.output_dir, e))?;
        Ok(Self {
            cfg,
            report: Report::default(),
        })
    }

    fn write(&mut self, name: &str, contents: String) -> Result<()> {
        let path = self.cfg.output_dir.join(name);
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.report.files.push(path);
        Ok(())
    }

    /// `# `-prefixed header, then `body`.
    fn csv(&mut self, name: &str, body: &str) -> Result<()> {
        let mut s: String = self.cfg.header_lines().iter().map(|l| format!("# {l}\n")).collect();
        s.push_str(body);
        self.write(name, s)
    }

    fn svg(&mut self, name: &str, h: &HeatmapData) -> Result<()> {
        let mut s = String::from("<!--\n");
        for l in self.cfg.header_lines() {
            writeln!(s, "# {l}").expect("write to string");
        }
        s.push_str("-->\n");
        s.push_str(&heatmap_svg(h));
        self.write(name, s)
    }

    fn say(&mut self, line: impl AsRef<str>) {
        self.report.stdout.push_str(line.as_ref());
        self.report.stdout.push('\n');
    }
}

pub fn dispatch(cfg: &RunConfig) -> Result<Report> {
    let mut w = Writer::new(cfg)?;
    match cfg.command {
        Command::KernelEval => kernel_eval(&mut w)?,
        Command::EmpiricalNtk => empirical(&mut w)?,
        Command::Spectrum => spectrum(&mut w)?,
        Command::DecayFit => decay_fit(&mut w)?,
        Command::Harmonics => harmonics(&mut w)?,
        Command::Sinusoids => sinusoids(&mut w)?,
        Command::Robustness => robustness(&mut w)?,
        Command::Gradcheck => grad_check(&mut w)?,
    }
    Ok(w.report)
}

fn kernel_eval(w: &mut Writer) -> Result<()> {
    let cfg = w.cfg;
    let kernel = DotProductKernel::parse(cfg.str("kernel")?)?;
    let t = cfg.f64("t")?;
    let v = kernel.eval(t)?;
    w.csv("kernel_eval.csv", &format!("kernel,t,value\n{},{t:.16e},{v:.16e}\n", kernel.name()))?;
    w.say(format!("{v:?}"));
    Ok(())
}

fn empirical(w: &mut Writer) -> Result<()> {
    let cfg = w.cfg;
    let (m, d, t) = (cfg.usize("width")?, cfg.usize("d")?, cfg.f64("t")?);
    let arch = Architecture::parse(cfg.str("arch")?)?;
    let (spec, closed) = match arch {
        Architecture::TwoLayerReLU => (NetworkSpec::two_layer_relu(d + 1, m), DotProductKernel::StandardNtk),
        Architecture::TwoLayerPi => (NetworkSpec::two_layer_pi(d + 1, m), DotProductKernel::PiKernel),
        other => {
            return Err(Error::UnsupportedArchitecture(format!(
                "empirical NTK needs a two-layer network, got {}",
                other.name()
            )))
        }
    };
    let (x, xp) = UnitVector::pair_with_inner_product(d + 1, t)?;
    let est = empirical_ntk(&spec, m, &x, &xp, cfg.master_seed, cfg.usize("draws")?)?;
    let reference = closed.eval(t)?;
    w.csv(
        "empirical_ntk.csv",
        &format!(
            "arch,width,t,draws,mean,stderr,closed_form\n{},{m},{t:.16e},{},{:.16e},{:.16e},{reference:.16e}\n",
            arch.name(),
            est.samples.len(),
            est.mean,
            est.stderr
        ),
    )?;
    w.say(format!("mean = {:?}", est.mean));
    w.say(format!("stderr = {:?}", est.stderr));
    w.say(format!("closed_form = {reference:?}"));
    Ok(())
}

/// Exponent `p` in `λ₀(k) ≈ c kᵖ` over the upper half of `1..=k_max`.
pub fn lambda0_growth_exponent(alpha: f64, k_max: usize) -> Result<f64> {
    let lo = (k_max / 2).max(1);
    let pts = (lo..=k_max)
        .map(|k| Ok(((k as f64).ln(), lambda0_kk(alpha, k)?.ln())))
        .collect::<Result<Vec<_>>>()?;
    if pts.len() < 2 {
        return Err(Error::Fit("need at least two degrees".into()));
    }
    Ok(least_squares(&pts).0)
}

fn spectrum(w: &mut Writer) -> Result<()> {
    let cfg = w.cfg;
    let kernel = DotProductKernel::parse(cfg.str("kernel")?)?;
    let (d, k_max, nodes) = (cfg.usize("d")?, cfg.usize("kmax")?, cfg.usize("nodes")?);
    let q = if nodes == 0 {
        QuadratureSpec::default_for(k_max)
    } else {
        QuadratureSpec::new(nodes)?
    };
    let s = compute_spectrum(&kernel, d, k_max, q)?;
    w.csv("spectrum.csv", &s.to_csv())?;
    w.say(format!("rows = {}", s.entries().len()));
    let zeros = s.entries().iter().filter(|e| e.numerically_zero).count();
    w.say(format!("numerically_zero = {zeros}"));
    if d % 2 == 1 && d >= 3 && k_max >= 4 {
        let alpha = (d as f64 - 1.0) / 2.0;
        w.say(format!(
            "lambda0_growth_exponent = {:?}",
            lambda0_growth_exponent(alpha, k_max)?
        ));
    }
    Ok(())
}

fn decay_fit(w: &mut Writer) -> Result<()> {
    let cfg = w.cfg;
    let input = resolve(&cfg.output_dir, cfg.str("input")?);
    let text = std::fs::read_to_string(&input).map_err(|e| Error::io(&input, e))?;
    let s = HarmonicSpectrum::from_csv(&text, None)?;
    let class = ClassFilter::parse(cfg.str("class")?)?;
    let f = decay_slope_fit(&s, cfg.usize("kmin")?, cfg.usize("kmax")?, class)?;
    w.csv(
        "decay_fit.csv",
        &format!(
            "class,kmin,kmax,points,slope,intercept,r_squared,reliable\n{},{},{},{},{:.16e},{:.16e},{:.16e},{}\n",
            class.name(),
            f.k_range.0,
            f.k_range.1,
            f.points,
            f.slope,
            f.intercept,
            f.r_squared,
            f.is_reliable()
        ),
    )?;
    w.say(format!("slope = {:?}", f.slope));
    w.say(format!("r_squared = {:?}", f.r_squared));
    if !f.is_reliable() {
        w.say("reliable = false");
    }
    Ok(())
}

fn resolve(dir: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        dir.join(p)
    }
}

fn amplitudes_or_ones(v: Vec<f64>, n: usize) -> Vec<f64> {
    if v.is_empty() {
        vec![1.0; n]
    } else {
        v
    }
}

fn runs(cfg: &RunConfig) -> Result<std::ops::Range<u64>> {
    let first = cfg.u64("first_run")?;
    Ok(first..first + cfg.u64("seeds")?)
}

fn harmonics(w: &mut Writer) -> Result<()> {
    let cfg = w.cfg;
    let arch = Architecture::parse(cfg.str("arch")?)?;
    let degrees = cfg.usize_list("degrees")?;
    let threshold = cfg.f64("threshold")?;
    let (mut trace, mut summary) = (format!("{TRACE_HEADER}\n"), format!("{SUMMARY_HEADER}\n"));
    let mut first = None;
    for run in runs(cfg)? {
        let h = HarmonicsConfig {
            architecture: arch,
            width: cfg.usize("width")?,
            samples: cfg.usize("samples")?,
            d: cfg.usize("d")?,
            amplitudes: amplitudes_or_ones(cfg.f64_list("amplitudes")?, degrees.len()),
            degrees: degrees.clone(),
            learning_rate: cfg.f64("lr")?,
            iterations: cfg.usize("iterations")?,
            record_every: cfg.usize("record_every")?,
            window: cfg.usize("window")?,
            stop_when_below: cfg.opt_f64("stop_at")?,
            master_seed: cfg.master_seed,
            run_index: run,
        };
        let r = run_harmonics(&h)?;
        let id = format!("{}-{run}", arch.name());
        append_trace(&mut trace, &id, run, &r.trace);
        append_loss(&mut trace, &id, run, r.trace.checkpoints(), &r.loss);
        append_summary(&mut summary, &id, run, &r.trace, threshold);
        let times: Vec<String> = (0..degrees.len())
            .map(|i| fmt_time(r.trace.time_to_threshold(i, threshold)))
            .collect();
        w.say(format!("{id}: time_to_threshold [{}]", times.join(", ")));
        first.get_or_insert(r.trace);
    }
    w.csv("trace.csv", &trace)?;
    w.csv("summary.csv", &summary)?;
    if let (true, Some(t)) = (cfg.bool("heatmap")?, first) {
        w.svg("heatmap.svg", &HeatmapData::from_trace(&t, "degree")?)?;
    }
    Ok(())
}

fn fmt_time(t: Option<usize>) -> String {
    t.map(|t| t.to_string()).unwrap_or_else(|| "never".into())
}

/// Network from the `arch`, `depth`, `width`, `mult`, `skips` and
/// `placement` keys.
pub fn network_spec(cfg: &RunConfig, input_dim: usize) -> Result<NetworkSpec> {
    let width = cfg.usize("width")?;
    let depth = cfg.usize("depth")?;
    let placement = match cfg.str("placement")? {
        "branch" => ActivationPlacement::Branch,
        "after-product" => ActivationPlacement::AfterProduct,
        other => return Err(Error::Config(format!("unknown placement `{other}`"))),
    };
    let spec = match Architecture::parse(cfg.str("arch")?)? {
        Architecture::Mlp => {
            let s = NetworkSpec::mlp(input_dim, width, depth, 1);
            if cfg.bool("skips")? {
                s.with_skips()
            } else {
                s
            }
        }
        Architecture::PiNcp => {
            NetworkSpec::pi_ncp(input_dim, width, depth, 1, cfg.usize_list("mult")?).with_placement(placement)
        }
        Architecture::TwoLayerReLU => NetworkSpec::two_layer_relu(input_dim, width),
        Architecture::TwoLayerPi => NetworkSpec::two_layer_pi(input_dim, width),
    };
    spec.validate()?;
    Ok(spec)
}

fn sinusoid_config(cfg: &RunConfig, run: u64) -> Result<SinusoidConfig> {
    let frequencies = cfg.usize_list("frequencies")?;
    let lr = cfg.f64("lr")?;
    let optimizer = match cfg.str("optimizer")? {
        "adam" => Optimizer::adam(),
        "gd" => Optimizer::GradientDescent,
        other => return Err(Error::Config(format!("unknown optimizer `{other}`"))),
    };
    Ok(SinusoidConfig {
        spec: network_spec(cfg, 1)?,
        amplitudes: amplitudes_or_ones(cfg.f64_list("amplitudes")?, frequencies.len()),
        frequencies,
        samples: cfg.usize("samples")?,
        learning_rate: lr,
        lr_multiplicative: cfg.opt_f64("lr_multiplicative")?.unwrap_or(lr / 10.0),
        optimizer,
        iterations: cfg.usize("iterations")?,
        record_every: cfg.usize("record_every")?,
        master_seed: cfg.master_seed,
        run_index: run,
        stop_when_converged: cfg.opt_f64("stop_at")?,
    })
}

fn run_id(spec: &NetworkSpec, run: u64) -> String {
    format!("{}-{run}", spec.kind.name())
}

fn record_sinusoid(trace: &mut String, summary: Option<&mut String>, id: &str, run: u64, r: &SinusoidRun, threshold: f64) {
    append_trace(trace, id, run, &r.trace);
    append_loss(trace, id, run, r.trace.checkpoints(), &r.loss);
    if let Some(s) = summary {
        append_summary(s, id, run, &r.trace, threshold);
    }
}

fn sinusoids(w: &mut Writer) -> Result<()> {
    let cfg = w.cfg;
    let threshold = cfg.f64("threshold")?;
    let (mut trace, mut summary) = (format!("{TRACE_HEADER}\n"), format!("{SUMMARY_HEADER}\n"));
    let mut first = None;
    for run in runs(cfg)? {
        let s = sinusoid_config(cfg, run)?;
        let r = run_sinusoids(&s)?;
        let id = run_id(&s.spec, run);
        record_sinusoid(&mut trace, Some(&mut summary), &id, run, &r, threshold);
        if cfg.bool("checkpoints")? {
            let path = cfg.output_dir.join(format!("checkpoint_{id}.bin"));
            save_checkpoint(&r.network, &path)?;
            w.report.files.push(path);
        }
        let times: Vec<String> = (0..s.frequencies.len())
            .map(|i| fmt_time(r.trace.time_to_threshold(i, threshold)))
            .collect();
        w.say(format!("{id}: time_to_threshold [{}]", times.join(", ")));
        first.get_or_insert(r.trace);
    }
    w.csv("trace.csv", &trace)?;
    w.csv("summary.csv", &summary)?;
    if let (true, Some(t)) = (cfg.bool("heatmap")?, first) {
        w.svg("heatmap.svg", &HeatmapData::from_trace(&t, "frequency")?)?;
    }
    Ok(())
}

fn robustness(w: &mut Writer) -> Result<()> {
    let cfg = w.cfg;
    let checkpoint = cfg.str("checkpoint")?;
    let range = runs(cfg)?;
    if !checkpoint.is_empty() && range.end - range.start != 1 {
        return Err(Error::Config("a checkpoint covers exactly one run; set seeds = 1".into()));
    }
    let deltas = cfg.f64_list("deltas")?;
    let mut trace = format!("{TRACE_HEADER}\n");
    let mut table = String::from("run_id,seed,delta,frequency,ratio\n");
    for run in range {
        let s = sinusoid_config(cfg, run)?;
        let id = run_id(&s.spec, run);
        let net: Network = if checkpoint.is_empty() {
            let r = run_sinusoids(&s)?;
            record_sinusoid(&mut trace, None, &id, run, &r, 0.5);
            r.network
        } else {
            let mut net = build(&s.spec, cfg.master_seed)?;
            load_checkpoint(&mut net, resolve(&cfg.output_dir, checkpoint))?;
            net
        };
        let target = s.target()?;
        let rc = RobustnessConfig {
            deltas: deltas.clone(),
            master_seed: cfg.master_seed,
            run_index: run,
        };
        let t = run_robustness(&net, &target, &rc)?;
        for (delta, row) in t.deltas.iter().zip(&t.rows) {
            for (k, r) in t.frequencies.iter().zip(row) {
                writeln!(table, "{id},{run},{delta:.16e},{k},{r:.16e}").expect("write to string");
            }
        }
        let top = *t.frequencies.last().expect("non-empty target");
        let line: Vec<String> = (0..t.deltas.len())
            .map(|i| format!("{:.3}", t.at(i, top).expect("frequency present")))
            .collect();
        w.say(format!("{id}: ratio at k={top} per delta [{}]", line.join(", ")));
    }
    w.csv("retention.csv", &table)?;
    if checkpoint.is_empty() {
        w.csv("trace.csv", &trace)?;
    }
    Ok(())
}

fn grad_check(w: &mut Writer) -> Result<()> {
    let cfg = w.cfg;
    let (d, batch) = (cfg.usize("input_dim")?, cfg.usize("batch")?);
    let spec = network_spec(cfg, d)?;
    let seeds = SeedStream::new(cfg.master_seed);
    let mut net = build_with_stream(&spec, &mut seeds.stream(0, Purpose::Init))?;
    let mut data = seeds.stream(0, Purpose::Data);
    let x = Tensor::matrix(batch, d, data.normal_vec(batch * d))?;
    let y = Tensor::matrix(batch, 1, data.normal_vec(batch))?;
    let loss = net.loss_node();
    let tol = cfg.f64("tolerance")?;
    let r = gradcheck(net.graph_mut(), &[("x", &x), ("y", &y)], loss, tol)?;
    w.csv(
        "gradcheck.csv",
        &format!(
            "parameters,checked,skipped,max_rel_error,tolerance,passed\n{},{},{},{:.16e},{:.16e},{}\n",
            net.graph().param_count(),
            r.checked,
            r.skipped,
            r.max_rel_error,
            r.tolerance,
            r.passed
        ),
    )?;
    w.say(format!("max_rel_error = {:?}", r.max_rel_error));
    w.say(format!("passed = {}", r.passed));
    if !r.passed {
        let (name, i) = r.worst.unwrap_or_default();
        return Err(Error::Precision(format!(
            "gradient check failed: relative error {:e} at {name}[{i}] exceeds {tol:e}",
            r.max_rel_error
        )));
    }
    Ok(())
}
