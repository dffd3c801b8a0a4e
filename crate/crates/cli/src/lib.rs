//! Command-line front end: argument parsing, the FGL cache, pipelines and
//! canonical JSON reports.

pub mod cache;
pub mod config;
pub mod pipeline;
pub mod report;
pub mod suite;

use std::ffi::OsString;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use tcm_core::character::{self, LambdaAlgebra};

use crate::cache::FglCache;
use crate::config::{Params, RunConfig};
use crate::pipeline::{self as pl, Session};
use crate::report::{emit_report, Report};

pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "tcm", version, about = "Transchromatic character maps over truncated Lubin–Tate rings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the formal group law and check its axioms and congruences.
    Fgl(Params),
    /// Weierstrass-prepare [p^k](x) over E and over L_t.
    Prep(Params),
    /// Torsion algebra and its connected–étale splitting.
    Torsion(Params),
    /// Étale coordinate, minimal polynomial, smoothness, subtraction units.
    Etale(Params),
    /// Character maps, Vandermonde and localization certificates.
    Charmap(Params),
    /// Commuting-tuple classes, class-function ranks and induction checks.
    Groups(Params),
    /// Run every check for a preset (the flagship preset runs the full suite).
    Verify(Params),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Fgl(_) => "fgl",
            Command::Prep(_) => "prep",
            Command::Torsion(_) => "torsion",
            Command::Etale(_) => "etale",
            Command::Charmap(_) => "charmap",
            Command::Groups(_) => "groups",
            Command::Verify(_) => "verify",
        }
    }
    fn params(&self) -> &Params {
        match self {
            Command::Fgl(p)
            | Command::Prep(p)
            | Command::Torsion(p)
            | Command::Etale(p)
            | Command::Charmap(p)
            | Command::Groups(p)
            | Command::Verify(p) => p,
        }
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let cfg = RunConfig::resolve(cli.command.params());
    let need_t = !matches!(cli.command, Command::Fgl(_) | Command::Groups(_));
    if let Err(msg) = cfg.validate(need_t) {
        eprintln!("tcm: invalid parameters: {msg}");
        return EXIT_USAGE;
    }
    let command = cli.command.name();
    let mut s = Session::new(Report::new(command, cfg.to_json()), FglCache::new(cfg.cache_dir.as_deref()));
    match &cli.command {
        Command::Verify(_) => suite::verify(&mut s, &cfg),
        Command::Groups(_) => groups(&mut s, &cfg),
        _ => run_stage(&mut s, &cfg, command),
    }
    if let Err(e) = emit_report(&s.report, cfg.output.as_deref()) {
        eprintln!("tcm: cannot write report: {e}");
        return 1;
    }
    s.report.status().exit_code()
}

fn lambda(s: &mut Session, cfg: &RunConfig) -> Option<LambdaAlgebra> {
    let f = s.fgl(cfg.p, cfg.n, cfg.a, cfg.d, cfg.df);
    let f = s.guard("fgl", f)?;
    let lt = s.guard("ring", pl::lt_ring(cfg.p, cfg.n, cfg.a, cfg.t, cfg.d, cfg.e))?;
    let la = s.timed("lambda algebra", || LambdaAlgebra::new(f, &lt, cfg.k, cfg.n - cfg.t));
    s.guard("lambda_algebra", la)
}

/// A single stage of the preset pipeline.
pub fn run_stage(s: &mut Session, cfg: &RunConfig, stage: &str) {
    if stage == "fgl" {
        let f = s.fgl(cfg.p, cfg.n, cfg.a, cfg.d, cfg.df);
        if let Some(f) = s.guard("fgl", f) {
            pl::fgl_section(s, "fgl", &f);
        }
        return;
    }
    if stage == "prep" {
        let f = s.fgl(cfg.p, cfg.n, cfg.a, cfg.d, cfg.df);
        let Some(f) = s.guard("fgl", f) else { return };
        let Some(lt) = s.guard("ring", pl::lt_ring(cfg.p, cfg.n, cfg.a, cfg.t, cfg.d, cfg.e)) else { return };
        pl::prep_section(s, "prep", &f, &lt, cfg.k, cfg.t);
        return;
    }
    let Some(la) = lambda(s, cfg) else { return };
    match stage {
        "torsion" => pl::torsion_section(s, "torsion", &la, cfg.t),
        "etale" => {
            pl::etale_section(s, "etale", &la, cfg.t);
            pl::subtraction_section(s, "etale", &la);
        }
        _ => charmap(s, cfg, "charmap", &la),
    }
}

pub fn charmap(s: &mut Session, cfg: &RunConfig, label: &str, la: &LambdaAlgebra) {
    pl::vandermonde_section(s, label, la);
    let budget = cfg.budget.unwrap_or_else(|| character::default_budget(la));
    let groups = if cfg.groups.is_empty() { vec![cfg.p.to_string()] } else { cfg.groups.clone() };
    for g in &groups {
        match pl::parse_abelian(g, cfg.p) {
            Ok(factors) => pl::charmap_section(s, label, la, &factors, budget),
            Err(msg) => s.check_with(&format!("{label}.G={g}"), false, "error", Some(msg)),
        }
    }
}

pub const DEFAULT_GROUPS: [&str; 7] = ["1", "Z2", "Z4", "Z2xZ2", "S3", "D4", "Q8"];

pub fn groups(s: &mut Session, cfg: &RunConfig) {
    let names: Vec<String> =
        if cfg.groups.is_empty() { DEFAULT_GROUPS.iter().map(|g| g.to_string()).collect() } else { cfg.groups.clone() };
    let r = cfg.n.saturating_sub(cfg.t).max(1);
    for name in &names {
        match pl::load_group(name) {
            Ok(g) => pl::group_section(s, "groups", &g, cfg.p as usize, r, cfg.t as u32),
            Err(msg) => s.check_with(&format!("groups.{name}"), false, "error", Some(msg)),
        }
    }
    pl::induction_section(s, "groups");
}

/// Every stage of a preset, sharing one `Λ`-algebra.
pub fn preset_pipeline(s: &mut Session, cfg: &RunConfig, prefix: &str) {
    let f = s.fgl(cfg.p, cfg.n, cfg.a, cfg.d, cfg.df);
    let Some(f) = s.guard(&format!("{prefix}fgl"), f) else { return };
    pl::fgl_section(s, &format!("{prefix}fgl"), &f);
    let Some(lt) = s.guard(&format!("{prefix}ring"), pl::lt_ring(cfg.p, cfg.n, cfg.a, cfg.t, cfg.d, cfg.e)) else { return };
    pl::prep_section(s, &format!("{prefix}prep"), &f, &lt, cfg.k, cfg.t);
    let la = s.timed(&format!("{prefix}lambda algebra"), || LambdaAlgebra::new(Arc::clone(&f), &lt, cfg.k, cfg.n - cfg.t));
    let Some(la) = s.guard(&format!("{prefix}lambda_algebra"), la) else { return };
    pl::torsion_section(s, &format!("{prefix}torsion"), &la, cfg.t);
    pl::etale_section(s, &format!("{prefix}etale"), &la, cfg.t);
    pl::subtraction_section(s, &format!("{prefix}etale"), &la);
    charmap(s, cfg, &format!("{prefix}charmap"), &la);
}
