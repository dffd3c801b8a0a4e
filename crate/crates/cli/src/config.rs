//! Run parameters: presets, flag overrides and validation.

use clap::{Args, ValueEnum};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// p = 2, n = 2, t = 1, k = 1
    Flagship,
    /// p = 3, n = 2, t = 1, k = 1
    Flagship3,
    /// p = 2, n = 2, t = 1, k = 2
    Level2,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Flagship => "flagship",
            Preset::Flagship3 => "flagship3",
            Preset::Level2 => "level2",
        }
    }

    pub fn config(self) -> RunConfig {
        let base = RunConfig { preset: Some(self), ..RunConfig::default() };
        match self {
            Preset::Flagship => RunConfig { a: 4, d: 12, e: 12, groups: vec!["2".into()], budget: Some(4), ..base },
            Preset::Flagship3 => RunConfig { p: 3, a: 2, d: 8, e: 8, df: 10, groups: vec!["3".into()], ..base },
            Preset::Level2 => RunConfig { k: 2, a: 2, d: 8, e: 8, groups: vec!["2".into()], ..base },
        }
    }
}

/// Flags shared by every subcommand; unset flags fall back to the preset,
/// then to the desk defaults.
#[derive(Args, Clone, Debug, Default)]
pub struct Params {
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub k: Option<u32>,
    /// Coefficients modulo p^a.
    #[arg(long)]
    pub a: Option<u32>,
    /// Top u-exponent kept.
    #[arg(long)]
    pub d: Option<i32>,
    /// Most negative u-exponent kept (L_t only).
    #[arg(long)]
    pub e: Option<i32>,
    /// Total degree of the stored formal group law.
    #[arg(long = "df")]
    pub df: Option<usize>,
    /// Exponent budget for localization witnesses.
    #[arg(long)]
    pub budget: Option<u32>,
    /// Cache directory (overrides TCM_CACHE_DIR).
    #[arg(long)]
    pub cache_dir: Option<String>,
    /// Report path; stdout when absent.
    #[arg(long, short)]
    pub output: Option<String>,
    /// Group: for charmap an order like `2`, `4`, `2x2`; for groups a corpus
    /// name or a JSON file. Repeatable.
    #[arg(long = "group")]
    pub groups: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub preset: Option<Preset>,
    pub p: u64,
    pub n: usize,
    pub t: usize,
    pub k: u32,
    pub a: u32,
    pub d: i32,
    pub e: i32,
    pub df: usize,
    pub budget: Option<u32>,
    pub cache_dir: Option<String>,
    pub output: Option<String>,
    pub groups: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            preset: None,
            p: 2,
            n: 2,
            t: 1,
            k: 1,
            a: 8,
            d: 16,
            e: 4,
            df: 12,
            budget: None,
            cache_dir: None,
            output: None,
            groups: vec![],
        }
    }
}

pub const MAX_P: u64 = 7;
pub const MAX_N: usize = 3;
pub const MAX_K: u32 = 3;
pub const MAX_BOX: i32 = 64;
pub const MAX_DF: usize = 32;
pub const MAX_BUDGET: u32 = 32;

impl RunConfig {
    pub fn resolve(f: &Params) -> RunConfig {
        let mut c = f.preset.map(Preset::config).unwrap_or_default();
        if f.preset.is_none() && f.p == Some(3) && f.df.is_none() {
            c.df = 10;
        }
        macro_rules! over {
            ($($x:ident),*) => { $( if let Some(v) = f.$x { c.$x = v; } )* };
        }
        over!(p, n, t, k, a, d, e, df);
        if f.budget.is_some() {
            c.budget = f.budget;
        }
        c.cache_dir = f.cache_dir.clone();
        c.output = f.output.clone();
        if !f.groups.is_empty() {
            c.groups = f.groups.clone();
        }
        c
    }

    /// Checks the documented bounds; `need_t` when the command splits over `L_t`.
    pub fn validate(&self, need_t: bool) -> Result<(), String> {
        let prime = self.p >= 2 && (2..self.p).all(|q| self.p % q != 0);
        if !prime || self.p > MAX_P {
            return Err(format!("p must be a prime <= {MAX_P}"));
        }
        if self.n == 0 || self.n > MAX_N {
            return Err(format!("n must be in 1..={MAX_N}"));
        }
        if need_t && !(1 <= self.t && self.t < self.n) {
            return Err("need 1 <= t < n".into());
        }
        if self.k == 0 || self.k > MAX_K {
            return Err(format!("k must be in 1..={MAX_K}"));
        }
        if self.a == 0 || self.p.checked_pow(self.a).map_or(true, |q| q >= 1 << 24) {
            return Err("p^a must be below 2^24".into());
        }
        if !(0..=MAX_BOX).contains(&self.d) || !(0..=MAX_BOX).contains(&self.e) {
            return Err(format!("d and e must be in 0..={MAX_BOX}"));
        }
        if self.df < 2 || self.df > MAX_DF {
            return Err(format!("df must be in 2..={MAX_DF}"));
        }
        if self.budget.map_or(false, |b| b > MAX_BUDGET) {
            return Err(format!("budget must be <= {MAX_BUDGET}"));
        }
        Ok(())
    }

    /// The parameters block of a report (paths are run-local and omitted).
    pub fn to_json(&self) -> Value {
        json!({
            "preset": self.preset.map(Preset::name),
            "p": self.p,
            "n": self.n,
            "t": self.t,
            "k": self.k,
            "a": self.a,
            "d": self.d,
            "e": self.e,
            "df": self.df,
            "budget": self.budget,
            "groups": self.groups,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_presets() {
        let f = Params { preset: Some(Preset::Level2), d: Some(10), ..Params::default() };
        let c = RunConfig::resolve(&f);
        assert_eq!((c.p, c.k, c.a, c.d, c.e), (2, 2, 2, 10, 8));
        assert!(c.validate(true).is_ok());
    }

    #[test]
    fn bounds_are_enforced() {
        let ok = RunConfig::default();
        assert!(ok.validate(true).is_ok());
        for bad in [
            RunConfig { p: 4, ..ok.clone() },
            RunConfig { t: 2, ..ok.clone() },
            RunConfig { k: 0, ..ok.clone() },
            RunConfig { a: 30, ..ok.clone() },
            RunConfig { df: 1, ..ok.clone() },
        ] {
            assert!(bad.validate(true).is_err(), "{bad:?}");
        }
        assert!(RunConfig { n: 1, t: 1, ..ok }.validate(false).is_ok());
    }
}
