//! Problem and scenario configuration files.
//!
//! The native encoding is sectioned `key = value` text (`#` comments); a
//! JSON object with the same section/key names is accepted as an
//! alternative encoding. Unknown sections or keys are hard errors with line
//! references — a misspelled exponent must never silently fall back to a
//! default. Every file starts with a `schema = 1` line.
//!
//! Scalar coefficient values are either a number (`1.0`) or a linear field
//! (`linear a0 ax ay`); vectors are two numbers.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::abp::AbpOptions;
use crate::envelope::EnvelopeMethod;
use crate::error::{Error, Result};
use crate::fields::{Hamiltonian, PsiField, ScalarField, VectorField};
use crate::grid::Grid;
use crate::operators::{Convention, Diffusion, InfScheme, OperatorConfig};
use crate::solver::{InitialGuess, ProblemSpec, SolveParams};

#[derive(Clone, Debug)]
struct RawValue {
    value: String,
    line: usize,
}

#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    sections: BTreeMap<String, BTreeMap<String, RawValue>>,
}

impl RawConfig {
    fn insert(&mut self, section: &str, key: &str, value: String, line: usize) {
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), RawValue { value, line });
    }
}

fn parse_kv_text(text: &str) -> Result<RawConfig> {
    let mut raw = RawConfig::default();
    let mut section = String::new();
    for (i, line0) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match line0.find('#') {
            Some(p) => &line0[..p],
            None => line0,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or(Error::Config {
                line: line_no,
                msg: "unterminated section header".into(),
            })?;
            section = name.trim().to_string();
            continue;
        }
        let (k, v) = line.split_once('=').okor_line(line_no, "expected `key = value`")?;
        raw.insert(&section, k.trim(), v.trim().to_string(), line_no);
    }
    Ok(raw)
}

trait OkOrLine<T> {
    fn okor_line(self, line: usize, msg: &str) -> Result<T>;
}
impl<T> OkOrLine<T> for Option<T> {
    fn okor_line(self, line: usize, msg: &str) -> Result<T> {
        self.ok_or(Error::Config {
            line,
            msg: msg.to_string(),
        })
    }
}

fn parse_json_text(text: &str) -> Result<RawConfig> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Config {
        line: e.line(),
        msg: format!("invalid json: {e}"),
    })?;
    let obj = v.as_object().ok_or(Error::Config {
        line: 0,
        msg: "top level must be an object".into(),
    })?;
    let mut raw = RawConfig::default();
    let scalar = |x: &serde_json::Value| -> String {
        match x {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Array(a) => a
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(" "),
            other => other.to_string(),
        }
    };
    for (k, val) in obj {
        match val {
            serde_json::Value::Object(sec) => {
                for (kk, vv) in sec {
                    raw.insert(k, kk, scalar(vv), 0);
                }
            }
            other => raw.insert("", k, scalar(other), 0),
        }
    }
    Ok(raw)
}

/// Typed view over one section that records which keys were consumed.
struct Section<'a> {
    name: String,
    map: Option<&'a BTreeMap<String, RawValue>>,
    used: Vec<String>,
}

impl<'a> Section<'a> {
    fn get(&mut self, key: &str) -> Option<&'a RawValue> {
        self.used.push(key.to_string());
        self.map.and_then(|m| m.get(key))
    }

    fn str_opt(&mut self, key: &str) -> Option<(String, usize)> {
        self.get(key).map(|r| (r.value.clone(), r.line))
    }

    fn f64_opt(&mut self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(r) => r
                .value
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::Config {
                    line: r.line,
                    msg: format!("key `{}.{key}`: expected a number, got `{}`", self.name, r.value),
                }),
        }
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    fn usize_or(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(r) => r.value.parse::<usize>().map_err(|_| Error::Config {
                line: r.line,
                msg: format!("key `{}.{key}`: expected an integer", self.name),
            }),
        }
    }

    fn field_or(&mut self, key: &str, default: f64) -> Result<ScalarField> {
        match self.get(key) {
            None => Ok(ScalarField::Const(default)),
            Some(r) => parse_scalar_field(&r.value, r.line),
        }
    }

    fn vec2_or(&mut self, key: &str, default: [f64; 2]) -> Result<[f64; 2]> {
        match self.get(key) {
            None => Ok(default),
            Some(r) => {
                let parts: Vec<&str> = r.value.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(Error::Config {
                        line: r.line,
                        msg: format!("key `{}.{key}`: expected two numbers", self.name),
                    });
                }
                let x = parts[0].parse().map_err(|_| Error::Config {
                    line: r.line,
                    msg: format!("key `{}.{key}`: bad number", self.name),
                })?;
                let y = parts[1].parse().map_err(|_| Error::Config {
                    line: r.line,
                    msg: format!("key `{}.{key}`: bad number", self.name),
                })?;
                Ok([x, y])
            }
        }
    }
}

fn parse_scalar_field(value: &str, line: usize) -> Result<ScalarField> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    if parts.len() == 1 {
        return parts[0]
            .parse::<f64>()
            .map(ScalarField::Const)
            .map_err(|_| Error::Config {
                line,
                msg: format!("expected a number or `linear a0 ax ay`, got `{value}`"),
            });
    }
    if parts.len() == 4 && parts[0] == "linear" {
        let nums: Vec<f64> = parts[1..]
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Config {
                line,
                msg: format!("bad linear field `{value}`"),
            })?;
        return Ok(ScalarField::Linear(nums[0], nums[1], nums[2]));
    }
    Err(Error::Config {
        line,
        msg: format!("expected a number or `linear a0 ax ay`, got `{value}`"),
    })
}

/// range of a linear field over the bounding box
fn linear_range(f: &ScalarField, lo: [f64; 2], hi: [f64; 2]) -> (f64, f64) {
    match f {
        ScalarField::Const(c) => (*c, *c),
        ScalarField::Linear(a0, ax, ay) => {
            let mut mn = f64::INFINITY;
            let mut mx = f64::NEG_INFINITY;
            for &x in &[lo[0], hi[0]] {
                for &y in &[lo[1], hi[1]] {
                    let v = a0 + ax * x + ay * y;
                    mn = mn.min(v);
                    mx = mx.max(v);
                }
            }
            (mn, mx)
        }
        _ => (f64::NAN, f64::NAN),
    }
}

#[derive(Clone, Debug)]
pub struct ProblemConfig {
    pub spec: ProblemSpec,
    pub solve: SolveParams,
    pub abp: AbpOptions,
    pub supconv_eps: f64,
    pub envelope_method: EnvelopeMethod,
}

#[derive(Clone, Debug)]
pub enum ScenarioConfig {
    ComparisonDisc {
        grid_n: usize,
        f_u: f64,
        f_v: f64,
        tol: f64,
    },
    NonUniqueness {
        theta: f64,
        sigma: f64,
        p: f64,
        n: usize,
        radii: usize,
    },
    SmpBarrier {
        n: usize,
        p: f64,
        r: f64,
        rho_sup: f64,
        c_sup: f64,
        samples: usize,
    },
    LiouvilleBarrier {
        p: f64,
        n: usize,
        alpha_lo: f64,
        alpha_hi: f64,
        alpha_count: usize,
        drift_scale: f64,
    },
}

#[derive(Clone, Debug)]
pub enum ParsedConfig {
    Problem(Box<ProblemConfig>),
    Scenario(ScenarioConfig),
}

/// Parse and fully validate a configuration file (key=value or JSON).
pub fn parse_config(text: &str) -> Result<ParsedConfig> {
    let raw = if text.trim_start().starts_with('{') {
        parse_json_text(text)?
    } else {
        parse_kv_text(text)?
    };
    build_config(&raw)
}

fn build_config(raw: &RawConfig) -> Result<ParsedConfig> {
    let mut consumed: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let section = |name: &str| Section {
        name: name.to_string(),
        map: raw.sections.get(name),
        used: Vec::new(),
    };

    // schema
    let mut root = section("");
    let (schema, schema_line) = root
        .str_opt("schema")
        .ok_or(Error::Config {
            line: 1,
            msg: "missing `schema = 1`".into(),
        })?;
    if schema.trim() != "1" {
        return Err(Error::Config {
            line: schema_line,
            msg: format!("unsupported schema `{schema}`"),
        });
    }
    consumed.insert("".into(), root.used);

    // scenario files short-circuit
    if raw.sections.contains_key("scenario") {
        let mut sc = section("scenario");
        let (kind, kind_line) = sc.str_opt("kind").ok_or(Error::Config {
            line: 0,
            msg: "scenario section needs `kind`".into(),
        })?;
        let parsed = match kind.as_str() {
            "comparison-disc" => ScenarioConfig::ComparisonDisc {
                grid_n: sc.usize_or("grid", 41)?,
                f_u: sc.f64_or("f_u", 2.0)?,
                f_v: sc.f64_or("f_v", 1.0)?,
                tol: sc.f64_or("tol", 1e-2)?,
            },
            "nonuniqueness" => {
                let theta = sc.f64_or("theta", 1.0)?;
                let sigma = sc.f64_or("sigma", 1.5)?;
                if !(theta < sigma && sigma < 1.0 + theta) {
                    return Err(Error::Config {
                        line: kind_line,
                        msg: format!(
                            "nonuniqueness needs theta < sigma < 1 + theta (theta = {theta}, sigma = {sigma})"
                        ),
                    });
                }
                ScenarioConfig::NonUniqueness {
                    theta,
                    sigma,
                    p: sc.f64_or("p", 3.0)?,
                    n: sc.usize_or("n", 2)?,
                    radii: sc.usize_or("radii", 100)?,
                }
            }
            "smp-barrier" => ScenarioConfig::SmpBarrier {
                n: sc.usize_or("n", 2)?,
                p: sc.f64_or("p", 2.0)?,
                r: sc.f64_or("r", 1.0)?,
                rho_sup: sc.f64_or("rho_sup", 0.0)?,
                c_sup: sc.f64_or("c_sup", 0.0)?,
                samples: sc.usize_or("samples", 256)?,
            },
            "liouville-barrier" => ScenarioConfig::LiouvilleBarrier {
                p: sc.f64_or("p", 2.0)?,
                n: sc.usize_or("n", 2)?,
                alpha_lo: sc.f64_or("alpha_lo", -0.9)?,
                alpha_hi: sc.f64_or("alpha_hi", -0.01)?,
                alpha_count: sc.usize_or("alpha_count", 20)?,
                drift_scale: sc.f64_or("drift_scale", 0.0)?,
            },
            other => {
                return Err(Error::Config {
                    line: kind_line,
                    msg: format!("unknown scenario kind `{other}`"),
                })
            }
        };
        consumed.insert("scenario".into(), sc.used);
        check_unknown(raw, &consumed)?;
        return Ok(ParsedConfig::Scenario(parsed));
    }

    // [problem]
    let mut pr = section("problem");
    let dim = pr.usize_or("dim", 2)?;
    if dim != 1 && dim != 2 {
        return Err(Error::Config {
            line: 0,
            msg: format!("dim = {dim} must be 1 or 2"),
        });
    }
    let grid_n = pr.usize_or("grid", 101)?;
    let bounds = pr.vec2_or("bounds", [-1.02, 1.02])?;
    let (domain, _) = pr.str_opt("domain").unwrap_or(("ball".into(), 0));
    let center = pr.vec2_or("center", [0.0, 0.0])?;
    let radius = pr.f64_or("radius", 1.0)?;
    let box_lo = pr.vec2_or("box_lo", [bounds[0], bounds[0]])?;
    let box_hi = pr.vec2_or("box_hi", [bounds[1], bounds[1]])?;
    let grid: Arc<Grid> = match (dim, domain.as_str()) {
        (1, _) => Grid::line(bounds[0], bounds[1], grid_n),
        (2, "ball") => Grid::ball_domain(center, radius, bounds[0], bounds[1], grid_n),
        (2, "box") => Grid::rect_masked([bounds[0], bounds[0]], [bounds[1], bounds[1]], [grid_n, grid_n], move |p| {
            p[0] >= box_lo[0] && p[0] <= box_hi[0] && p[1] >= box_lo[1] && p[1] <= box_hi[1]
        }),
        (_, other) => {
            return Err(Error::Config {
                line: 0,
                msg: format!("unknown domain kind `{other}`"),
            })
        }
    };
    consumed.insert("problem".into(), pr.used);

    // [psi]
    let mut ps = section("psi");
    let (psi_kind, psi_line) = ps.str_opt("kind").unwrap_or(("constant-power".into(), 0));
    let lo = [bounds[0], bounds[0]];
    let hi = [bounds[1], bounds[1]];
    let mut psi = match psi_kind.as_str() {
        "constant-power" => PsiField::constant_power(ps.f64_or("p_hat", 0.0)?),
        "double-phase" => {
            let coeff = ps.field_or("coeff", 1.0)?;
            let cr = linear_range(&coeff, lo, hi);
            PsiField::double_phase(ps.f64_or("p_hat", 1.0)?, ps.f64_or("q_hat", 2.0)?, coeff, cr)
        }
        "log-double-phase" => {
            let coeff = ps.field_or("coeff", 1.0)?;
            let cr = linear_range(&coeff, lo, hi);
            PsiField::log_double_phase(ps.f64_or("p_hat", 1.0)?, coeff, cr)
        }
        "variable-power" => {
            let p_hat = ps.field_or("p_hat", 1.0)?;
            let prange = linear_range(&p_hat, lo, hi);
            PsiField::variable_power(p_hat, prange)
        }
        "variable-double-phase" => {
            let p_hat = ps.field_or("p_hat", 1.0)?;
            let q_hat = ps.field_or("q_hat", 2.0)?;
            let coeff = ps.field_or("coeff", 1.0)?;
            let pr_ = linear_range(&p_hat, lo, hi);
            let qr = linear_range(&q_hat, lo, hi);
            let cr = linear_range(&coeff, lo, hi);
            PsiField::variable_double_phase(p_hat, q_hat, coeff, (pr_.0.min(qr.0), pr_.1.max(qr.1)), cr)
        }
        "log-variable-double-phase" => {
            let p_hat = ps.field_or("p_hat", 1.0)?;
            let coeff = ps.field_or("coeff", 1.0)?;
            let pr_ = linear_range(&p_hat, lo, hi);
            let cr = linear_range(&coeff, lo, hi);
            PsiField::log_variable_double_phase(p_hat, coeff, pr_, cr)
        }
        other => {
            return Err(Error::Config {
                line: psi_line,
                msg: format!("unknown psi kind `{other}`"),
            })
        }
    };
    // Optional overrides of the declared constants.
    if let Some(v) = ps.f64_opt("i_psi")? {
        psi.constants.i_psi = v;
    }
    if let Some(v) = ps.f64_opt("s_psi")? {
        psi.constants.s_psi = v;
    }
    if let Some(v) = ps.f64_opt("l1")? {
        psi.constants.l1 = v;
    }
    if let Some(v) = ps.f64_opt("l2")? {
        psi.constants.l2 = v;
    }
    if let Some(v) = ps.f64_opt("a")? {
        psi.constants.a = v;
    }
    if let Some(v) = ps.f64_opt("b")? {
        psi.constants.b = v;
    }
    psi.constants.validate()?;
    consumed.insert("psi".into(), ps.used);

    // [hamiltonian]
    let mut hs = section("hamiltonian");
    let (ham_kind, ham_line) = hs.str_opt("kind").unwrap_or(("zero".into(), 0));
    let sigma = hs.f64_or("sigma", 1.0)?;
    let c0 = hs.f64_or("c0", 0.0)?;
    let c1 = hs.f64_or("c1", 2.0 + psi.constants.i_psi)?;
    let rho = hs.field_or("rho", 0.0)?;
    let theta = hs.f64_or("theta", psi.constants.i_psi.max(0.0))?;
    let mut ham = match ham_kind.as_str() {
        "zero" => Hamiltonian::zero(),
        "drift-power" => Hamiltonian::drift_power(
            VectorField::Const(hs.vec2_or("drift", [0.0, 0.0])?),
            theta,
            rho.clone(),
            sigma,
            c0,
            c1,
        ),
        "two-power" => Hamiltonian::two_power(
            hs.field_or("coeff", 0.0)?,
            theta,
            rho.clone(),
            sigma,
            c0,
            c1,
        ),
        other => {
            return Err(Error::Config {
                line: ham_line,
                msg: format!("unknown hamiltonian kind `{other}`"),
            })
        }
    };
    if !matches!(ham.kind, crate::fields::HamiltonianKind::Zero) {
        ham.sigma = sigma;
        ham.c0 = c0;
        ham.c1 = c1;
        ham.validate().map_err(|e| Error::Config {
            line: ham_line.max(1),
            msg: format!("{e}; the growth window requires c0 < sigma < c1"),
        })?;
    }
    consumed.insert("hamiltonian".into(), hs.used);

    // [operator]
    let mut os = section("operator");
    let (diff, diff_line) = os.str_opt("diffusion").unwrap_or(("infinity".into(), 0));
    let diffusion = match diff.as_str() {
        "infinity" => Diffusion::Infinity,
        "p" => Diffusion::PFinite(os.f64_or("p", 2.0)?),
        "h" => Diffusion::HHomogeneous(os.f64_or("h", 1.0)?),
        "variable-p" => Diffusion::VariableP(os.field_or("p", 2.0)?),
        other => {
            return Err(Error::Config {
                line: diff_line,
                msg: format!("unknown diffusion `{other}`"),
            })
        }
    };
    let convention = match os.str_opt("convention") {
        None => Convention::Mean,
        Some((s, line)) => match s.as_str() {
            "mean" => Convention::Mean,
            "sum" => Convention::Sum,
            other => {
                return Err(Error::Config {
                    line,
                    msg: format!("unknown convention `{other}`"),
                })
            }
        },
    };
    let scheme = match os.str_opt("scheme") {
        None => InfScheme::Aligned,
        Some((s, line)) => match s.as_str() {
            "aligned" => InfScheme::Aligned,
            "minmax" => InfScheme::MinMax,
            other => {
                return Err(Error::Config {
                    line,
                    msg: format!("unknown scheme `{other}`"),
                })
            }
        },
    };
    let mut op = OperatorConfig::new(diffusion)
        .with_convention(convention)
        .with_scheme(scheme);
    op.eps_grad = os.f64_or("eps_grad", 1e-8)?;
    op.stencil_dirs = os.usize_or("stencil_dirs", 16)?;
    op.validate()?;
    consumed.insert("operator".into(), os.used);

    // [data]
    let mut ds = section("data");
    let f = ds.field_or("f", 0.0)?;
    let g = ds.field_or("g", 0.0)?;
    consumed.insert("data".into(), ds.used);

    // [solve]
    let mut ss = section("solve");
    let solve = SolveParams {
        safety: ss.f64_or("safety", 0.9)?,
        tol: ss.f64_or("tol", 1e-3)?,
        max_iters: ss.usize_or("max_iters", 200_000)?,
        initial: match ss.str_opt("init") {
            None => InitialGuess::Zero,
            Some((s, line)) => match s.as_str() {
                "zero" => InitialGuess::Zero,
                "boundary-harmonic" => InitialGuess::BoundaryHarmonic,
                other => {
                    return Err(Error::Config {
                        line,
                        msg: format!("unknown initial guess `{other}`"),
                    })
                }
            },
        },
        psi_floor_scale: ss.f64_or("psi_floor_scale", 1e-6)?,
        log_stride: ss.usize_or("log_stride", 50)?,
    };
    consumed.insert("solve".into(), ss.used);

    // [abp]
    let mut asx = section("abp");
    let abp = AbpOptions {
        levels: asx.usize_or("levels", 16)?,
        slack: asx.f64_or("slack", 0.05)?,
        method: match asx.str_opt("envelope") {
            None => EnvelopeMethod::Hull,
            Some((s, line)) => match s.as_str() {
                "hull" => EnvelopeMethod::Hull,
                "iterative" => EnvelopeMethod::Iterative,
                other => {
                    return Err(Error::Config {
                        line,
                        msg: format!("unknown envelope method `{other}`"),
                    })
                }
            },
        },
        advisory_tol: asx.f64_or("advisory_tol", 1e-2)?,
    };
    consumed.insert("abp".into(), asx.used);

    // [supconv]
    let mut scs = section("supconv");
    let supconv_eps = scs.f64_or("eps", 1e-3)?;
    consumed.insert("supconv".into(), scs.used);

    check_unknown(raw, &consumed)?;

    let spec = ProblemSpec {
        grid,
        psi,
        ham,
        op,
        f,
        g,
    };
    spec.validate()?;
    Ok(ParsedConfig::Problem(Box::new(ProblemConfig {
        spec,
        solve,
        abp,
        supconv_eps,
        envelope_method: EnvelopeMethod::Hull,
    })))
}

fn check_unknown(raw: &RawConfig, consumed: &BTreeMap<String, Vec<String>>) -> Result<()> {
    let mut problems = Vec::new();
    for (sec, keys) in &raw.sections {
        match consumed.get(sec) {
            None => {
                let line = keys.values().map(|r| r.line).min().unwrap_or(0);
                problems.push((line, format!("unknown section `[{sec}]`")));
            }
            Some(used) => {
                for (k, r) in keys {
                    if !used.contains(k) {
                        problems.push((r.line, format!("unknown key `{k}` in section `[{sec}]`")));
                    }
                }
            }
        }
    }
    if let Some(&(line, _)) = problems.first().as_deref() {
        let msg = problems
            .iter()
            .map(|(l, m)| format!("line {l}: {m}"))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::Config { line, msg });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL_DISC: &str = "\
schema = 1
[problem]
domain = ball
grid = 41
[psi]
kind = constant-power
p_hat = 0.0
[hamiltonian]
kind = zero
[operator]
diffusion = infinity
[data]
f = 1.0
g = 0.0
";

    #[test]
    fn minimal_disc_config_parses() {
        let parsed = parse_config(MINIMAL_DISC).unwrap();
        match parsed {
            ParsedConfig::Problem(p) => {
                assert_eq!(p.spec.grid.shape(), [41, 41]);
                assert!(matches!(p.spec.op.diffusion, Diffusion::Infinity));
            }
            _ => panic!("expected a problem config"),
        }
    }

    #[test]
    fn sigma_at_window_edge_rejected() {
        let text = "\
schema = 1
[problem]
grid = 21
[psi]
kind = constant-power
p_hat = 0.0
[hamiltonian]
kind = drift-power
drift = 0.1 0.0
sigma = 2.0
[operator]
diffusion = infinity
";
        let err = parse_config(text).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("window"), "{msg}");
    }

    #[test]
    fn unknown_key_is_hard_error() {
        let text = format!("{MINIMAL_DISC}[psi2]\npsii = 1.0\n");
        let err = parse_config(&text).unwrap_err();
        assert!(format!("{err}").contains("unknown section"), "{err}");

        let text2 = MINIMAL_DISC.replace("p_hat = 0.0", "p_hat = 0.0\npsii = 1.0");
        let err2 = parse_config(&text2).unwrap_err();
        let msg = format!("{err2}");
        assert!(msg.contains("psii") && msg.contains("line"), "{msg}");
    }

    #[test]
    fn json_encoding_accepted() {
        let text = r#"{
  "schema": 1,
  "problem": {"domain": "ball", "grid": 31},
  "psi": {"kind": "constant-power", "p_hat": 0.0},
  "hamiltonian": {"kind": "zero"},
  "operator": {"diffusion": "p", "p": 3.0, "convention": "mean"},
  "data": {"f": 1.0, "g": 0.0}
}"#;
        match parse_config(text).unwrap() {
            ParsedConfig::Problem(p) => {
                assert!(matches!(p.spec.op.diffusion, Diffusion::PFinite(v) if v == 3.0));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn scenario_config_parses() {
        let text = "\
schema = 1
[scenario]
kind = nonuniqueness
theta = 1.0
sigma = 1.5
p = 3.0
n = 2
";
        match parse_config(text).unwrap() {
            ParsedConfig::Scenario(ScenarioConfig::NonUniqueness { theta, sigma, p, n, .. }) => {
                assert_eq!((theta, sigma, p, n), (1.0, 1.5, 3.0, 2));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn nonuniqueness_window_checked() {
        let text = "\
schema = 1
[scenario]
kind = nonuniqueness
theta = 1.0
sigma = 2.5
";
        assert!(parse_config(text).is_err());
    }
}
