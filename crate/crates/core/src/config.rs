//! TOML configuration: one file with optional `[context]`, `[transform]`,
//! `[charge]`, `[scan]` and `[law]` tables.
//!
//! Rational fields are strings `"p/q"` (or `"p"`); bare TOML integers are accepted
//! as a convenience. `t` may also be `"p/q*sqrt3"`.

use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::angle::PolarScalar;
use crate::cohlattice::{AbelianContext, CohClass};
use crate::error::{Error, Result};
use crate::field::{QSqrt3, Real};
use crate::fmtransform::FMTransformSpec;
use crate::rational::{self, Q};
use crate::scan::ScanRequest;
use crate::stability::ChargeSpec;

/// A rational written either as a string or as a TOML integer.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum RatField {
    Int(i64),
    Str(String),
}

impl RatField {
    pub fn value(&self, field: &str) -> Result<Q> {
        match self {
            RatField::Int(v) => Ok(rational::int(*v)),
            RatField::Str(s) => {
                rational::parse(s).map_err(|e| Error::Config(format!("{field}: {e}")))
            }
        }
    }

    fn real(&self, field: &str) -> Result<Real> {
        match self {
            RatField::Int(v) => Ok(Real::rational(rational::int(*v))),
            RatField::Str(s) => QSqrt3::parse(s)
                .map(Real::Exact)
                .map_err(|e| Error::Config(format!("{field}: {e}"))),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextSection {
    pub g: usize,
    pub n: RatField,
    #[serde(default = "default_label")]
    pub label: String,
}

fn default_label() -> String {
    "X".into()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformSection {
    pub g: Option<usize>,
    #[serde(rename = "nX")]
    pub n_x: RatField,
    #[serde(rename = "nY")]
    pub n_y: Option<RatField>,
    pub r: RatField,
    #[serde(rename = "dX", default)]
    pub d_x: Option<RatField>,
    #[serde(rename = "dY", default)]
    pub d_y: Option<RatField>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChargeSection {
    pub k: Option<usize>,
    pub b: RatField,
    pub t: RatField,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub k: usize,
    pub v: String,
    #[serde(default)]
    pub walls: Vec<String>,
    pub b_range: [RatField; 2],
    pub t_range: [RatField; 2],
    pub resolution: [usize; 2],
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawSection {
    /// `λ@p/q`, meaning `λ·e^{iπp/q}`.
    pub u: Option<String>,
    pub lambda: Option<RatField>,
    pub k: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub context: Option<ContextSection>,
    pub transform: Option<TransformSection>,
    pub charge: Option<ChargeSection>,
    pub scan: Option<ScanSection>,
    pub law: Option<LawSection>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The base variety: `[context]` if present, otherwise the transform source.
    pub fn context(&self) -> Result<Arc<AbelianContext>> {
        if let Some(c) = &self.context {
            return AbelianContext::new(c.g, c.n.value("context.n")?, c.label.clone());
        }
        if self.transform.is_some() {
            return Ok(self.transform()?.src().clone());
        }
        Err(Error::Config(
            "missing [context] (or [transform]) section".into(),
        ))
    }

    pub fn transform(&self) -> Result<FMTransformSpec> {
        let t = self
            .transform
            .as_ref()
            .ok_or_else(|| Error::Config("missing [transform] section".into()))?;
        let g = match (t.g, &self.context) {
            (Some(g), Some(c)) if g != c.g => {
                return Err(Error::Config(format!(
                    "transform.g = {g} differs from context.g = {}",
                    c.g
                )))
            }
            (Some(g), _) => g,
            (None, Some(c)) => c.g,
            (None, None) => {
                return Err(Error::Config(
                    "transform.g is required without [context]".into(),
                ))
            }
        };
        let n_x = t.n_x.value("transform.nX")?;
        let r = t.r.value("transform.r")?;
        if !rational::is_integer(&r) || r <= Q::from_integer(0.into()) {
            return Err(Error::Config(format!(
                "transform.r must be a positive integer, got {}",
                rational::format_short(&r)
            )));
        }
        let r: u64 = r
            .to_integer()
            .try_into()
            .map_err(|_| Error::Config("transform.r is too large".into()))?;
        let d_x = t
            .d_x
            .as_ref()
            .map(|d| d.value("transform.dX"))
            .transpose()?
            .unwrap_or_default();
        let d_y = t
            .d_y
            .as_ref()
            .map(|d| d.value("transform.dY"))
            .transpose()?
            .unwrap_or_default();
        let src_label = self
            .context
            .as_ref()
            .map(|c| c.label.clone())
            .unwrap_or_else(default_label);
        if let Some(c) = &self.context {
            if c.n.value("context.n")? != n_x {
                return Err(Error::Config("transform.nX differs from context.n".into()));
            }
        }
        let src = AbelianContext::new(g, n_x, src_label)?;
        match &t.n_y {
            Some(n_y) => {
                let dst = AbelianContext::new(g, n_y.value("transform.nY")?, "Y")?;
                FMTransformSpec::new(src, dst, r, d_x, d_y)
            }
            None => FMTransformSpec::with_derived_target(src, "Y", r, d_x, d_y),
        }
    }

    pub fn charge(&self) -> Result<ChargeSpec> {
        let c = self
            .charge
            .as_ref()
            .ok_or_else(|| Error::Config("missing [charge] section".into()))?;
        let ctx = self.context()?;
        let k = c.k.unwrap_or(ctx.g());
        ChargeSpec::new(&ctx, k, c.b.real("charge.b")?, c.t.real("charge.t")?)
    }

    pub fn scan(&self) -> Result<ScanRequest> {
        let s = self
            .scan
            .as_ref()
            .ok_or_else(|| Error::Config("missing [scan] section".into()))?;
        let ctx = self.context()?;
        let v = CohClass::parse(&ctx, &s.v)?;
        let walls = s
            .walls
            .iter()
            .map(|w| CohClass::parse(&ctx, w))
            .collect::<Result<Vec<_>>>()?;
        let req = ScanRequest {
            ctx,
            k: s.k,
            v,
            walls,
            b_range: (
                s.b_range[0].value("scan.b_range")?,
                s.b_range[1].value("scan.b_range")?,
            ),
            t_range: (
                s.t_range[0].value("scan.t_range")?,
                s.t_range[1].value("scan.t_range")?,
            ),
            resolution: (s.resolution[0], s.resolution[1]),
        };
        req.validate()?;
        Ok(req)
    }

    /// The law parameter `u`, if configured.
    pub fn law_u(&self) -> Result<Option<PolarScalar>> {
        match self.law.as_ref().and_then(|l| l.u.as_ref()) {
            Some(u) => PolarScalar::parse(u).map(Some),
            None => Ok(None),
        }
    }

    pub fn law_lambda(&self) -> Result<Option<Q>> {
        self.law
            .as_ref()
            .and_then(|l| l.lambda.as_ref())
            .map(|l| l.value("law.lambda"))
            .transpose()
    }

    pub fn law_k(&self) -> Option<usize> {
        self.law.as_ref().and_then(|l| l.k)
    }
}
