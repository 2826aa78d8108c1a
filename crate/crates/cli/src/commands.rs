use crate::config::RunConfig;
use anyhow::{bail, Context, Result};
use gcl_core::channel::{compose, GaussianChannel, NoiseClass};
use gcl_core::degradability::{classify, weak_complement, DegradabilityVerdict, VerdictKind};
use gcl_core::dilation::{
    dilate_case_i, dilate_pure, dilate_reduced_mixed, dilate_reduced_pure, UnitaryDilation,
};
use gcl_core::io::{self, Document};
use gcl_core::linalg::inverse;
use gcl_core::random::{random_covariance, seeded};
use gcl_core::state::{is_pure, validate_state};
use gcl_core::twomode::{thermal_classify, thermal_verdict, ClassKind, TwoModeClass};
use serde::Serialize;
use std::io::Read;
use std::path::Path;

/// Whether every validation in a command passed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    ValidationFailed,
}

pub fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .context("reading standard input")?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_document(path: &str) -> Result<Document> {
    let text = read_input(path)?;
    io::document_from_json(&text).with_context(|| format!("parsing {path}"))
}

fn parse_channel(path: &str) -> Result<GaussianChannel> {
    match parse_document(path)? {
        Document::Channel(ch) => Ok(ch),
        Document::Dilation(d) => Ok(d.channel()?),
        Document::State(_) => bail!("{path}: expected a channel, found a state"),
    }
}

#[derive(Serialize)]
struct ChannelReport {
    ok: bool,
    min_eig: f64,
    r: usize,
    r_prime: usize,
    k: usize,
    class: &'static str,
    minimal_noise: bool,
}

#[derive(Serialize)]
struct StateReport {
    ok: bool,
    min_eig: f64,
    pure: bool,
}

#[derive(Serialize)]
struct DilationReport {
    ok: bool,
    ell: usize,
    pure: bool,
    env_valid: bool,
}

pub fn validate(config: &RunConfig, path: &str) -> Result<Status> {
    let tol = config.tol_psd;
    let (ok, text) = match parse_document(path)? {
        Document::Channel(ch) => {
            let (ok, min_eig) = ch.validate_cp(tol);
            let ranks = ch.rank_invariants()?;
            let class = if ch.is_trivial(tol) {
                "trivial"
            } else if ch.modes_in != ch.modes_out {
                "rectangular"
            } else {
                ch.noise_class()?.label()
            };
            let report = ChannelReport {
                ok,
                min_eig,
                r: ranks.defect_rank,
                r_prime: ranks.extremal_rank,
                k: ranks.noise_rank,
                class,
                minimal_noise: ch.is_minimal_noise(1e-8)?,
            };
            (ok, io::to_json(&report))
        }
        Document::State(state) => {
            let (ok, min_eig) = validate_state(&state.covariance, tol)?;
            let pure = ok && is_pure(&state.covariance, 1e-7)?;
            (ok, io::to_json(&StateReport { ok, min_eig, pure }))
        }
        Document::Dilation(d) => {
            let env_valid = d.env_is_valid(tol)?;
            let report = DilationReport {
                ok: env_valid,
                ell: d.env_modes,
                pure: d.pure,
                env_valid,
            };
            (env_valid, io::to_json(&report))
        }
    };
    emit(config.output_path.as_deref(), &text)?;
    Ok(if ok { Status::Ok } else { Status::ValidationFailed })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Flavor {
    /// l = n, needs Y and Sigma invertible (case i).
    #[value(name = "case_i")]
    CaseI,
    /// l = 2n with a pure environment.
    Pure,
    /// Pure environment with 2n - r'/2 modes.
    #[value(name = "reduced_pure")]
    ReducedPure,
    /// Mixed environment with 2n - r/2 modes.
    #[value(name = "reduced_mixed")]
    ReducedMixed,
}

impl Flavor {
    fn dilate(self, ch: &GaussianChannel) -> gcl_core::Result<UnitaryDilation> {
        match self {
            Flavor::CaseI => dilate_case_i(ch),
            Flavor::Pure => dilate_pure(ch),
            Flavor::ReducedPure => dilate_reduced_pure(ch),
            Flavor::ReducedMixed => dilate_reduced_mixed(ch),
        }
    }
}

const ROUND_TRIP_INPUTS: usize = 5;

pub fn dilate(config: &RunConfig, path: &str, flavor: Flavor) -> Result<Status> {
    let ch = parse_channel(path)?;
    let d = flavor
        .dilate(&ch)
        .with_context(|| format!("{flavor:?} dilation, channel class ({})", class_label(&ch)))?;
    let mut rng = seeded(config.seed);
    let residual = (0..ROUND_TRIP_INPUTS)
        .map(|_| d.round_trip_residual(&ch, &random_covariance(&mut rng, ch.modes_in)))
        .fold(0.0, f64::max);
    eprintln!("ell = {}, pure = {}, round-trip residual = {residual:.3e}", d.env_modes, d.pure);
    emit(config.output_path.as_deref(), &io::dilation_to_json(&d))?;
    Ok(Status::Ok)
}

fn class_label(ch: &GaussianChannel) -> &'static str {
    ch.noise_class().map(NoiseClass::label).unwrap_or("?")
}

#[derive(Serialize)]
struct ClassifyReport {
    #[serde(flatten)]
    verdict: DegradabilityVerdict,
    dilation: &'static str,
    ad_certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

#[derive(Serialize)]
struct TwoModeReport {
    class: TwoModeClass,
    occupation: f64,
    verdict: VerdictKind,
    closed_form: VerdictKind,
    w_min_eig: f64,
    w_max_eig: f64,
    spectrum: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    A,
    B,
    C,
}

pub struct TwoModeArgs {
    pub family: Family,
    pub a: f64,
    pub b: Option<f64>,
    pub occupation: f64,
}

impl TwoModeArgs {
    fn class(&self) -> Result<TwoModeClass> {
        let cls = match self.family {
            Family::A => TwoModeClass::diagonal(self.a, self.b.unwrap_or(self.a)),
            Family::B => TwoModeClass::defective(self.a),
            Family::C => {
                let Some(b) = self.b else {
                    bail!("class C needs --b");
                };
                TwoModeClass::new(ClassKind::C, self.a, b)?
            }
        };
        cls.check()?;
        Ok(cls)
    }
}

pub fn classify_file(config: &RunConfig, path: &str) -> Result<Status> {
    let (d, dilation) = match parse_document(path)? {
        Document::Dilation(d) => (d, "file"),
        Document::Channel(ch) => {
            if ch.noise_class()? == NoiseClass::FullRank {
                (dilate_case_i(&ch)?, "case_i")
            } else {
                (dilate_pure(&ch)?, "pure")
            }
        }
        Document::State(_) => bail!("{path}: expected a channel or dilation, found a state"),
    };
    let ch = d.channel()?;
    let comp = weak_complement(&d)?;
    let verdict = classify(&ch, &comp, config.tol_psd)?;
    let singular = comp.modes_in != comp.modes_out
        || inverse(&comp.transfer, "weak complement transfer matrix").is_err();
    let note = singular.then(|| {
        "weak complement transfer matrix is singular or not square; \
         anti-degradability is not certified"
            .to_string()
    });
    let report = ClassifyReport {
        verdict,
        dilation,
        ad_certified: !singular,
        note,
    };
    emit(config.output_path.as_deref(), &io::to_json(&report))?;
    Ok(Status::Ok)
}

pub fn classify_two_mode(config: &RunConfig, args: &TwoModeArgs) -> Result<Status> {
    let cls = args.class()?;
    let closed_form = thermal_classify(&cls, args.occupation)?;
    let verdict = thermal_verdict(&cls, args.occupation, config.tol_psd)?;
    let report = TwoModeReport {
        class: cls,
        occupation: args.occupation,
        verdict: verdict.kind,
        closed_form,
        w_min_eig: verdict.w_min_eig,
        w_max_eig: verdict.w_max_eig,
        spectrum: verdict.spectrum,
    };
    emit(config.output_path.as_deref(), &io::to_json(&report))?;
    Ok(Status::Ok)
}

pub fn compose_files(config: &RunConfig, first: &str, second: &str) -> Result<Status> {
    let composed = compose(&parse_channel(first)?, &parse_channel(second)?)?;
    emit(config.output_path.as_deref(), &io::channel_to_json(&composed))?;
    Ok(Status::Ok)
}
