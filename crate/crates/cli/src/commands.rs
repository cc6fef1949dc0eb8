use std::io::Write;
use std::path::{Path, PathBuf};

use nbldpc::de::{reduce_by_conjugation, surface_csv, threshold_surface, DensityEvolution};
use nbldpc::onthefly::{mean_and_std_error, trial_rng};
use nbldpc::sim::{epsilon_grid, failure_integral, simulate};
use nbldpc::{
    decode, decode_stream, estimate_inefficiency, sample_code, ArrivalStream, BitObservation, ChannelOutput, Coset,
    DecodeOutcome, Encoder, LdpcCode,
};
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::config::{read_file, DeEcho, EnsembleEcho, Params, Rounding};
use crate::error::{CliError, CliResult};
use crate::provenance::{sha256_hex, Provenance};

pub const DEFAULT_SEED: u64 = 1;
const DEFAULT_GRID: usize = 21;
const DEFAULT_SIM_TRIALS: usize = 100;
const DEFAULT_MU_TRIALS: usize = 1000;
const DEFAULT_INEFFICIENCY_GRID: usize = 50;
const DEFAULT_GRID_TRIALS: usize = 200;
const DEFAULT_RESOLUTION: usize = 25;

/// Where artifacts and progress go.
pub struct Sink {
    pub output: Option<PathBuf>,
    pub verbose: bool,
}

impl Sink {
    pub fn emit(&self, text: &str) -> CliResult<()> {
        match &self.output {
            Some(path) => write_file(path, text),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
            }
        }
    }

    pub fn progress(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// An input file named in the configuration, echoed with its digest.
#[derive(Clone, Debug, Serialize)]
struct InputFile {
    path: String,
    sha256: String,
}

fn input(path: &Path) -> CliResult<(String, InputFile)> {
    let text = read_file(path)?;
    let echo = InputFile { path: path.display().to_string(), sha256: sha256_hex(text.as_bytes()) };
    Ok((text, echo))
}

fn load_code(params: &Params) -> CliResult<(LdpcCode, InputFile)> {
    let path = Params::require(&params.code, "code")?;
    let (text, echo) = input(&path)?;
    Ok((LdpcCode::from_text(&text)?, echo))
}

fn json_text(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct GenCodeConfig {
    #[serde(flatten)]
    ensemble: EnsembleEcho,
    n: usize,
    rounding: Rounding,
    seed: u64,
}

pub fn gen_code(params: Params, sink: &Sink) -> CliResult<()> {
    let (ens, echo) = params.ensemble()?;
    let config = GenCodeConfig {
        ensemble: echo,
        n: Params::require(&params.n, "n")?,
        rounding: params.rounding.unwrap_or_default(),
        seed: params.seed.unwrap_or(DEFAULT_SEED),
    };
    let code = sample_code(config.n, &ens, config.seed, config.rounding.into())?;
    let k_bin = Encoder::new(&code).k_bin();
    let prov = Provenance::new("gen-code", 1, &config);
    sink.emit(&format!("{}{}", prov.comment_header(), code.to_text()))?;
    eprintln!(
        "N={} M={} K_bin={} rate={:.6}",
        code.n(),
        code.m(),
        k_bin,
        k_bin as f64 / (code.n() * code.p() as usize) as f64
    );
    Ok(())
}

#[derive(Serialize)]
struct EncodeConfig {
    code: InputFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<InputFile>,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
}

fn parse_message(text: &str, k_bin: usize) -> CliResult<Vec<bool>> {
    let mut bits = Vec::with_capacity(k_bin);
    for (i, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        for c in line.chars().filter(|c| !c.is_whitespace()) {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(CliError::Runtime(format!("message line {}: invalid character `{c}`", i + 1))),
            }
        }
    }
    if bits.len() != k_bin {
        return Err(CliError::Runtime(format!("message has {} bits, the code carries {k_bin}", bits.len())));
    }
    Ok(bits)
}

pub fn encode(params: Params, sink: &Sink) -> CliResult<()> {
    let (code, code_echo) = load_code(&params)?;
    let encoder = Encoder::new(&code);
    let seed = params.seed.unwrap_or(DEFAULT_SEED);
    let mut rng = trial_rng(seed, 0);
    let (message, message_echo) = match &params.message {
        Some(path) => {
            let (text, echo) = input(path)?;
            (parse_message(&text, encoder.k_bin())?, Some(echo))
        }
        None => ((0..encoder.k_bin()).map(|_| rng.gen()).collect(), None),
    };
    if let Some(eps) = params.epsilon {
        if !(0.0..=1.0).contains(&eps) {
            return Err(CliError::Usage(format!("epsilon {eps} is outside [0, 1]")));
        }
    }
    let word = encoder.encode(&message)?;
    let channel = match params.epsilon {
        Some(eps) => ChannelOutput::transmit(&word, code.p(), eps, &mut rng),
        None => ChannelOutput::noiseless(&word, code.p()),
    };
    let config = EncodeConfig { code: code_echo, message: message_echo, seed, epsilon: params.epsilon };
    let prov = Provenance::new("encode", 1, &config);
    sink.emit(&format!("{}{}", prov.comment_header(), channel.to_text()))?;
    sink.progress(format!("K_bin={} erased_bits={}", encoder.k_bin(), channel.erased_bits()));
    Ok(())
}

#[derive(Serialize)]
struct DecodeConfig {
    code: InputFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    channel: Option<InputFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stream: Option<InputFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_iters: Option<usize>,
}

/// The bits common to every element of each set, with `x` for the rest.
fn project(sets: &[Coset], p: u8) -> ChannelOutput {
    let mask = ((1u16 << p) - 1) as u8;
    let obs = sets
        .iter()
        .map(|s| {
            let free = s.direction().basis().iter().fold(0u8, |acc, v| acc | v);
            let known = mask & !free;
            BitObservation::new(known, s.offset().value() & known)
        })
        .collect();
    ChannelOutput::new(p, obs)
}

pub fn decode_cmd(params: Params, sink: &Sink) -> CliResult<()> {
    let (code, code_echo) = load_code(&params)?;
    let (sets, summary, config) = match (&params.channel, &params.stream) {
        (Some(path), None) => {
            let (text, echo) = input(path)?;
            let channel = ChannelOutput::from_text(&text, code.p())?;
            let result = decode(&code, &channel, params.max_iters)?;
            let outcome = match result.outcome {
                DecodeOutcome::Success => "success",
                DecodeOutcome::Stalled => "stalled",
            };
            let summary =
                format!("outcome={outcome} iterations={} residual_bits={}", result.iterations, result.residual_bits());
            let config =
                DecodeConfig { code: code_echo, channel: Some(echo), stream: None, max_iters: params.max_iters };
            (result.sets, summary, config)
        }
        (None, Some(path)) => {
            let (text, echo) = input(path)?;
            let stream = ArrivalStream::from_text(&text, code.n(), code.p())?;
            let out = decode_stream(&code, &stream)?;
            let summary = match out.k_received {
                Some(k) => format!("outcome=complete k_received={k} of {}", stream.len()),
                None => format!("outcome=incomplete received={}", stream.len()),
            };
            let config = DecodeConfig { code: code_echo, channel: None, stream: Some(echo), max_iters: None };
            (out.sets, summary, config)
        }
        _ => return Err(CliError::Usage("decode needs exactly one of `channel` or `stream`".into())),
    };
    let prov = Provenance::new("decode", 1, &config);
    let body = project(&sets, code.p()).to_text();
    sink.emit(&format!("{}# result: {summary}\n{body}", prov.comment_header()))?;
    sink.progress(summary);
    Ok(())
}

#[derive(Serialize)]
struct SimulateConfig {
    code: InputFile,
    eps: Vec<f64>,
    trials: usize,
    seed: u64,
}

pub fn simulate_cmd(params: Params, sink: &Sink) -> CliResult<()> {
    let (code, code_echo) = load_code(&params)?;
    let eps = match &params.eps {
        Some(list) => list.clone(),
        None => epsilon_grid(params.grid.unwrap_or(DEFAULT_GRID)),
    };
    if eps.is_empty() {
        return Err(CliError::Usage("the erasure probability grid is empty".into()));
    }
    let config = SimulateConfig {
        code: code_echo,
        eps,
        trials: params.trials.unwrap_or(DEFAULT_SIM_TRIALS),
        seed: params.seed.unwrap_or(DEFAULT_SEED),
    };
    let points = simulate(&code, &config.eps, config.trials, config.seed)?;
    let prov = Provenance::new("simulate", 1, &config);
    let mut out = prov.comment_header();
    out.push_str("epsilon,trials,block_failures,bit_erasures_residual\n");
    for pt in &points {
        out.push_str(&format!("{},{},{},{}\n", pt.epsilon, pt.trials, pt.block_failures, pt.residual_bits));
    }
    sink.emit(&out)
}

#[derive(Serialize)]
struct ThresholdConfig {
    #[serde(flatten)]
    ensemble: EnsembleEcho,
    #[serde(flatten)]
    de: DeEcho,
    reduce: bool,
}

pub fn threshold_cmd(params: Params, sink: &Sink) -> CliResult<()> {
    let (ens, echo) = params.ensemble()?;
    let (query, de) = params.de_query(ens)?;
    let config = ThresholdConfig { ensemble: echo, de, reduce: params.reduce.unwrap_or(false) };
    let (threshold, state_size) = if config.reduce {
        let r = reduce_by_conjugation(query)?;
        (r.threshold(), r.state_size())
    } else {
        let de = DensityEvolution::new(query)?;
        (de.threshold(), de.lattice().len())
    };
    let prov = Provenance::new("threshold", 1, &config);
    let method = if config.reduce { "reduced" } else { "full" };
    let doc = prov.envelope(json!({ "threshold": threshold, "method": method, "state_size": state_size }));
    sink.emit(&json_text(&doc))
}

#[derive(Serialize)]
struct SurfaceConfig {
    #[serde(flatten)]
    ensemble: EnsembleEcho,
    #[serde(flatten)]
    de: DeEcho,
    resolution: usize,
}

pub fn threshold_surface_cmd(params: Params, sink: &Sink) -> CliResult<()> {
    let (ens, echo) = params.ensemble()?;
    let (query, de) = params.de_query(ens)?;
    let config = SurfaceConfig { ensemble: echo, de, resolution: params.resolution.unwrap_or(DEFAULT_RESOLUTION) };
    let points = threshold_surface(&query, config.resolution)?;
    if let Some(best) = points.iter().min_by(|a, b| a.threshold.total_cmp(&b.threshold)) {
        sink.progress(format!("minimum threshold {:.6} at f = {:?}", best.threshold, best.f));
    }
    let prov = Provenance::new("threshold-surface", 1, &config);
    sink.emit(&format!("{}{}", prov.comment_header(), surface_csv(&points)))
}

#[derive(Serialize)]
#[serde(untagged)]
enum CodeSource {
    File {
        code: InputFile,
    },
    Sampled {
        #[serde(flatten)]
        ensemble: EnsembleEcho,
        n: usize,
        rounding: Rounding,
    },
}

#[derive(Serialize)]
struct InefficiencyConfig {
    #[serde(flatten)]
    source: CodeSource,
    seed: u64,
    trials: usize,
    grid: usize,
    grid_trials: usize,
}

pub fn inefficiency_cmd(params: Params, sink: &Sink, mu_csv: Option<&Path>) -> CliResult<()> {
    let seed = params.seed.unwrap_or(DEFAULT_SEED);
    let (code, source) = if params.code.is_some() {
        let (code, echo) = load_code(&params)?;
        (code, CodeSource::File { code: echo })
    } else {
        let (ens, echo) = params.ensemble()?;
        let n = Params::require(&params.n, "n")?;
        let rounding = params.rounding.unwrap_or_default();
        (sample_code(n, &ens, seed, rounding.into())?, CodeSource::Sampled { ensemble: echo, n, rounding })
    };
    let config = InefficiencyConfig {
        source,
        seed,
        trials: params.trials.unwrap_or(DEFAULT_MU_TRIALS),
        grid: params.grid.unwrap_or(DEFAULT_INEFFICIENCY_GRID),
        grid_trials: params.grid_trials.unwrap_or(DEFAULT_GRID_TRIALS),
    };
    sink.progress(format!("streaming {} trials", config.trials));
    let report = estimate_inefficiency(&code, config.trials, seed)?;
    sink.progress(format!("simulating {} grid points x {} trials", config.grid, config.grid_trials));
    let points = simulate(&code, &epsilon_grid(config.grid), config.grid_trials, seed)?;
    let (integral, integral_se) = failure_integral(&points);
    let (mean, mu_se) = mean_and_std_error(&report.mu_samples);
    let bits = (code.n() * code.p() as usize) as f64;
    let scale = (bits + 1.0) / report.k_bin as f64;
    let prov = Provenance::new("inefficiency", 1, &config);
    let doc = prov.envelope(json!({
        "n": code.n(),
        "p": code.p(),
        "k_bin": report.k_bin,
        "mu": { "mean": mean, "std_error": mu_se, "trials": report.trials, "incomplete": report.incomplete },
        "failure_integral": {
            "value": integral,
            "std_error": integral_se,
            "grid_points": config.grid,
            "trials_per_point": config.grid_trials,
        },
        "mu_minus_one": mean - 1.0,
        "difference": mean - 1.0 - integral,
        "combined_std_error": (mu_se * mu_se + integral_se * integral_se).sqrt(),
        "mu_from_integral": { "value": scale * integral, "std_error": scale * integral_se },
    }));
    if let Some(path) = mu_csv {
        let mut csv = prov.comment_header();
        csv.push_str("sample,mu\n");
        for (i, mu) in report.mu_samples.iter().enumerate() {
            csv.push_str(&format!("{i},{mu}\n"));
        }
        write_file(path, &csv)?;
    }
    sink.emit(&json_text(&doc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nbldpc::{Subspace, Symbol};

    #[test]
    fn projection_marks_free_bits() {
        let sets =
            [Coset::new(Symbol(0b101), Subspace::span([0b010])), Coset::new(Symbol(0b011), Subspace::span([0b110]))];
        assert_eq!(project(&sets, 3).to_text(), "1x1\nxx1\n");
    }

    #[test]
    fn message_parsing() {
        assert_eq!(parse_message("# m\n10 1\n1\n", 4).unwrap(), vec![true, false, true, true]);
        assert!(parse_message("102", 3).is_err());
        assert!(parse_message("10", 3).is_err());
    }
}
