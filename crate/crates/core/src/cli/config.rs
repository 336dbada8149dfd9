//! Flat `section.key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored; everything after the
//! first `=` is the value. Keys are unique and unknown keys are errors.
//! Domain and density keys have no defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dirichlet_solver::SolverConfig;
use crate::eigen_iteration::{InitStrategy, IterationConfig};
use crate::error::{Error, Result};
use crate::geometry::{DensitySpec, DomainSpec, Mode};

/// Default slack for the ordering check in `open-question`.
pub const DEFAULT_TOL_CMP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    /// Whitespace-separated `.dat` files for gnuplot.
    Gnuplot,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "gnuplot" => Ok(Format::Gnuplot),
            other => Err(format!(
                "unknown format `{other}` (expected csv, json or gnuplot)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub domain: DomainSpec,
    pub density: DensitySpec,
    pub solver: SolverConfig,
    pub iteration: IterationConfig,
    pub init: InitStrategy,
    pub output_dir: PathBuf,
    pub formats: Vec<Format>,
    /// Directory of an earlier `solve` run for `oracle` to compare against.
    pub compare_dir: Option<PathBuf>,
    pub ode_res: Option<usize>,
    pub tol_cmp: f64,
}

impl RunConfig {
    pub fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Entries::parse(text)?;
        let cfg = Self::from_entries(&mut entries)?;
        entries.finish()?;
        Ok(cfg)
    }

    fn from_entries(e: &mut Entries) -> Result<Self> {
        let n: usize = e.required("domain.n")?;
        let radius: f64 = e.required("domain.radius")?;
        let mode: Mode = e.required("domain.mode")?;
        let domain = match mode {
            Mode::FullGrid => DomainSpec {
                n,
                radius,
                mode,
                grid_res: Some(e.required("domain.grid_res")?),
                radial_res: None,
            },
            Mode::Radial => DomainSpec {
                n,
                radius,
                mode,
                grid_res: None,
                radial_res: Some(e.required("domain.radial_res")?),
            },
        };
        domain
            .validate()
            .map_err(|err| config_error("domain", err))?;

        let kind: String = e.required("density.kind")?;
        let density = match kind.as_str() {
            "constant" => DensitySpec::Constant(e.required("density.c")?),
            "radial-polynomial" => {
                let coeffs: List<f64> = e.required("density.coeffs")?;
                DensitySpec::RadialPolynomial(coeffs.0)
            }
            "gaussian-bump" => {
                let center: List<f64> = e.required("density.center")?;
                let center = match center.0[..] {
                    [x, y] => [x, y],
                    _ => return Err(key_error("density.center", "expected two numbers `x, y`")),
                };
                DensitySpec::GaussianBump {
                    base: e.required("density.base")?,
                    amplitude: e.required("density.amplitude")?,
                    center,
                    width: e.required("density.width")?,
                }
            }
            other => {
                return Err(key_error(
                    "density.kind",
                    &format!("unknown kind `{other}` (expected constant, radial-polynomial or gaussian-bump)"),
                ))
            }
        };
        density
            .validate(&domain)
            .map_err(|err| config_error("density", err))?;

        let defaults = SolverConfig::default();
        let solver = SolverConfig {
            tol_lin: e.optional("solver.tol_lin")?.unwrap_or(defaults.tol_lin),
            tol_solver: e
                .optional("solver.tol_solver")?
                .unwrap_or(defaults.tol_solver),
            max_lin_iters: e
                .optional("solver.max_lin_iters")?
                .unwrap_or(defaults.max_lin_iters),
        };
        solver
            .validate()
            .map_err(|err| config_error("solver", err))?;

        let defaults = IterationConfig::default();
        let iteration = IterationConfig {
            tol_r: e.optional("iteration.tol_r")?.unwrap_or(defaults.tol_r),
            tol_u: e.optional("iteration.tol_u")?.unwrap_or(defaults.tol_u),
            max_iters: e
                .optional("iteration.max_iters")?
                .unwrap_or(defaults.max_iters),
            tol_mono: e
                .optional("iteration.tol_mono")?
                .unwrap_or(defaults.tol_mono),
            normalize_each_step: e
                .optional("iteration.normalize_each_step")?
                .unwrap_or(defaults.normalize_each_step),
        };
        iteration
            .validate()
            .map_err(|err| config_error("iteration", err))?;

        let strategy: String = e
            .optional("init.strategy")?
            .unwrap_or_else(|| "scaled-rho".into());
        let init = match strategy.as_str() {
            "scaled-rho" => {
                let margin: f64 = e.optional("init.margin")?.unwrap_or(0.01);
                if !(margin.is_finite() && margin >= 0.0) {
                    return Err(key_error("init.margin", "must be a nonnegative number"));
                }
                InitStrategy::ScaledRho { margin }
            }
            "ma-of-f" => InitStrategy::MaOfF,
            other => {
                return Err(key_error(
                    "init.strategy",
                    &format!("unknown strategy `{other}` (expected scaled-rho or ma-of-f)"),
                ))
            }
        };

        let output_dir = e
            .optional::<String>("output.dir")?
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("out"));
        let formats = e
            .optional::<List<Format>>("output.formats")?
            .map(|l| l.0)
            .unwrap_or_else(|| vec![Format::Csv, Format::Json]);
        if formats.is_empty() {
            return Err(key_error(
                "output.formats",
                "at least one format is required",
            ));
        }

        let compare_dir = e.optional::<String>("oracle.compare")?.map(PathBuf::from);
        let ode_res: Option<usize> = e.optional("oracle.ode_res")?;
        let tol_cmp: f64 = e.optional("openq.tol_cmp")?.unwrap_or(DEFAULT_TOL_CMP);
        if !(tol_cmp.is_finite() && tol_cmp >= 0.0) {
            return Err(key_error("openq.tol_cmp", "must be a nonnegative number"));
        }

        Ok(Self {
            domain,
            density,
            solver,
            iteration,
            init,
            output_dir,
            formats,
            compare_dir,
            ode_res,
            tol_cmp,
        })
    }
}

fn key_error(key: &str, message: &str) -> Error {
    Error::Config {
        key: key.to_string(),
        message: message.to_string(),
    }
}

fn config_error(section: &str, err: Error) -> Error {
    key_error(section, &err.to_string())
}

/// Comma-separated list value.
struct List<T>(Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: std::fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(|item| {
                item.trim()
                    .parse::<T>()
                    .map_err(|e| format!("`{}`: {e}", item.trim()))
            })
            .collect::<std::result::Result<Vec<T>, String>>()
            .map(List)
    }
}

struct Entries {
    values: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (number, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(key_error(
                    line,
                    &format!("line {}: expected `key = value`", number + 1),
                ));
            };
            let key = key.trim();
            if key.is_empty() {
                return Err(key_error("", &format!("line {}: empty key", number + 1)));
            }
            if let Some((first, _)) =
                values.insert(key.to_string(), (number + 1, value.trim().to_string()))
            {
                return Err(key_error(
                    key,
                    &format!(
                        "line {}: duplicate key (first set on line {first})",
                        number + 1
                    ),
                ));
            }
        }
        Ok(Self { values })
    }

    fn optional<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.remove(key) {
            None => Ok(None),
            Some((line, value)) => value
                .parse::<T>()
                .map(Some)
                .map_err(|e| key_error(key, &format!("line {line}: cannot parse `{value}`: {e}"))),
        }
    }

    fn required<T: FromStr>(&mut self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.optional(key)?
            .ok_or_else(|| key_error(key, "required key is missing"))
    }

    fn finish(self) -> Result<()> {
        match self.values.into_iter().next() {
            None => Ok(()),
            Some((key, (line, _))) => Err(key_error(
                &key,
                &format!("line {line}: unknown key, or not used with this domain and density"),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DISK: &str = "
        # unit disk
        domain.n = 1
        domain.radius = 1
        domain.mode = full-grid
        domain.grid_res = 65
        density.kind = constant
        density.c = 1
    ";

    fn bad_key(text: &str) -> String {
        match RunConfig::parse(text) {
            Err(Error::Config { key, .. }) => key,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn parses_minimal_disk() {
        let cfg = RunConfig::parse(DISK).unwrap();
        assert_eq!(cfg.domain, DomainSpec::full_grid(1.0, 65));
        assert_eq!(cfg.density, DensitySpec::Constant(1.0));
        assert_eq!(cfg.solver, SolverConfig::default());
        assert_eq!(cfg.iteration, IterationConfig::default());
        assert_eq!(cfg.formats, vec![Format::Csv, Format::Json]);
        assert_eq!(cfg.output_dir, PathBuf::from("out"));
    }

    #[test]
    fn parses_everything_else() {
        let text = "
            domain.n = 2
            domain.radius = 1.5
            domain.mode = radial
            domain.radial_res = 300
            density.kind = radial-polynomial
            density.coeffs = 1, 0.5
            solver.tol_lin = 1e-11
            iteration.max_iters = 7
            iteration.normalize_each_step = true
            init.strategy = ma-of-f
            output.dir = results
            output.formats = csv, gnuplot
            oracle.ode_res = 1200
            openq.tol_cmp = 1e-5
        ";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.domain, DomainSpec::radial(2, 1.5, 300));
        assert_eq!(cfg.density, DensitySpec::RadialPolynomial(vec![1.0, 0.5]));
        assert_eq!(cfg.solver.tol_lin, 1e-11);
        assert_eq!(cfg.iteration.max_iters, 7);
        assert!(cfg.iteration.normalize_each_step);
        assert_eq!(cfg.init, InitStrategy::MaOfF);
        assert_eq!(cfg.formats, vec![Format::Csv, Format::Gnuplot]);
        assert_eq!(cfg.ode_res, Some(1200));
        assert_eq!(cfg.tol_cmp, 1e-5);
    }

    #[test]
    fn names_the_offending_key() {
        assert_eq!(
            bad_key(&DISK.replace("domain.radius = 1", "domain.radius = -1")),
            "domain"
        );
        assert_eq!(bad_key(&format!("{DISK}\nsolver.tol = 3")), "solver.tol");
        assert_eq!(bad_key(&format!("{DISK}\ndomain.n = 1")), "domain.n");
        assert_eq!(bad_key(&DISK.replace("density.c = 1", "")), "density.c");
        assert_eq!(
            bad_key(&DISK.replace("domain.grid_res = 65", "domain.grid_res = many")),
            "domain.grid_res"
        );
        assert_eq!(
            bad_key(&format!("{DISK}\ndomain.radial_res = 100")),
            "domain.radial_res"
        );
        assert_eq!(
            bad_key(&format!("{DISK}\noutput.formats = csv, png")),
            "output.formats"
        );
        assert_eq!(
            bad_key(&DISK.replace("density.kind = constant", "density.kind = flat")),
            "density.kind"
        );
    }

    #[test]
    fn no_defaults_for_physical_parameters() {
        assert_eq!(bad_key(""), "domain.n");
        assert_eq!(bad_key("domain.n = 1\ndomain.radius = 1"), "domain.mode");
    }
}
