//! Versioned JSON spec files.
//!
//! Finite tables:
//!
//! ```json
//! {"version": 1, "backend": "finite", "scale": [2, 2],
//!  "layers": [{"level": 1, "filled": [{"residue": 0, "symbol": 1}]}]}
//! ```
//!
//! Ruled skeletons name a preset family, or `"rule"` with the rule itself as
//! `params`:
//!
//! ```json
//! {"version": 1, "backend": "ruled", "family": "fat-cantor", "depth": 6}
//! ```

use std::fmt;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use toeplitz_core::families::{generate, HoleTreeRule, Preset};
use toeplitz_core::skeleton::Backend;
use toeplitz_core::{Scale, SkeletonSpec, Symbol};

pub const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    Finite,
    Ruled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub version: u32,
    pub backend: BackendKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub layers: Vec<LayerDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerDoc {
    pub level: usize,
    pub filled: Vec<FillDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FillDoc {
    pub residue: Residue,
    pub symbol: Symbol,
}

/// A residue written as a JSON integer, or as a decimal string when it does
/// not fit in 64 bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residue(pub BigUint);

impl Serialize for Residue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_u64() {
            Some(v) => s.serialize_u64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Residue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(Residue(v.into())),
            Raw::Text(t) => t
                .parse()
                .map(Residue)
                .map_err(|_| serde::de::Error::custom(format!("residue {t:?} is not a non-negative integer"))),
        }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl SpecFile {
    pub fn from_json(text: &str) -> anyhow::Result<SpecFile> {
        serde_json::from_str(text).context("malformed spec file")
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec files serialize");
        s.push('\n');
        s
    }

    /// Builds the skeleton, checking schema and residue invariants.
    pub fn build(&self) -> anyhow::Result<SkeletonSpec> {
        if self.version != VERSION {
            bail!("unsupported spec version {} (expected {VERSION})", self.version);
        }
        match self.backend {
            BackendKind::Finite => self.build_finite(),
            BackendKind::Ruled => self.build_ruled(),
        }
    }

    fn build_finite(&self) -> anyhow::Result<SkeletonSpec> {
        if self.family.is_some() || self.params.is_some() || self.depth.is_some() {
            bail!("finite spec files take `scale` and `layers` only");
        }
        let q = self.scale.clone().ok_or_else(|| anyhow!("finite spec file without `scale`"))?;
        let scale = Scale::new(q)?;
        let mut layers = vec![Vec::new(); scale.depth()];
        let mut last = 0;
        for layer in &self.layers {
            if layer.level <= last {
                bail!("layer levels must increase strictly from 1; found {} after {last}", layer.level);
            }
            if layer.level > scale.depth() {
                bail!("layer level {} exceeds the scale depth {}", layer.level, scale.depth());
            }
            last = layer.level;
            layers[layer.level - 1] = layer.filled.iter().map(|f| (f.residue.0.clone(), f.symbol)).collect();
        }
        Ok(SkeletonSpec::finite(scale, layers)?)
    }

    fn build_ruled(&self) -> anyhow::Result<SkeletonSpec> {
        if self.scale.is_some() {
            bail!("ruled spec files derive their scale from the family; remove `scale`");
        }
        let family = self.family.as_deref().ok_or_else(|| anyhow!("ruled spec file without `family`"))?;
        let depth = self.depth.ok_or_else(|| anyhow!("ruled spec file without `depth`"))?;
        let rule = match (Preset::from_name(family), family) {
            (Some(preset), _) => {
                let empty = self.params.as_ref().is_none_or(|p| p.as_object().is_some_and(|o| o.is_empty()));
                if !empty {
                    bail!("family {family} takes no params");
                }
                preset.rule()
            }
            (None, "rule") => {
                let params = self.params.clone().ok_or_else(|| anyhow!("family `rule` needs `params`"))?;
                serde_json::from_value::<HoleTreeRule>(params).context("invalid rule params")?
            }
            (None, other) => bail!(
                "unknown family {other:?}; expected one of {}, rule",
                Preset::ALL.map(Preset::name).join(", ")
            ),
        };
        let spec = generate(&rule, depth)?;
        // Listed layers must agree with the generated ones.
        for layer in &self.layers {
            if layer.level == 0 || layer.level > depth {
                bail!("layer level {} outside 1..={depth}", layer.level);
            }
            let mut listed: Vec<(BigUint, Symbol)> =
                layer.filled.iter().map(|f| (f.residue.0.clone(), f.symbol)).collect();
            listed.sort();
            let mut generated: Vec<(BigUint, Symbol)> = spec.layer(layer.level)?.collect();
            generated.sort();
            if listed != generated {
                bail!("layer {} differs from the layer generated by family {family}", layer.level);
            }
        }
        Ok(spec)
    }

    /// Canonical document for `spec`: presets by name, other rules inline,
    /// finite tables with every level listed and residues ascending.
    pub fn emit(spec: &SkeletonSpec) -> SpecFile {
        match spec.backend() {
            Backend::Ruled(rule) => {
                let (family, params) = match Preset::ALL.into_iter().find(|p| &p.rule() == rule) {
                    Some(p) => (p.name().to_string(), None),
                    None => ("rule".to_string(), Some(serde_json::to_value(rule).expect("rules serialize"))),
                };
                SpecFile {
                    version: VERSION,
                    backend: BackendKind::Ruled,
                    scale: None,
                    family: Some(family),
                    params,
                    depth: Some(spec.depth()),
                    layers: Vec::new(),
                }
            }
            Backend::FiniteTable(tables) => SpecFile {
                version: VERSION,
                backend: BackendKind::Finite,
                scale: Some(spec.scale().radices().to_vec()),
                family: None,
                params: None,
                depth: None,
                layers: tables
                    .iter()
                    .enumerate()
                    .map(|(i, t)| LayerDoc {
                        level: i + 1,
                        filled: t.iter().map(|(r, &s)| FillDoc { residue: Residue(r.clone()), symbol: s }).collect(),
                    })
                    .collect(),
            },
        }
    }

    /// The finite table of `spec` unrolled to its depth.
    pub fn emit_finite(spec: &SkeletonSpec) -> anyhow::Result<SpecFile> {
        let layers = (1..=spec.depth())
            .map(|l| {
                let mut fills: Vec<(BigUint, Symbol)> = spec.layer(l)?.collect();
                fills.sort();
                Ok(fills)
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        Ok(SpecFile::emit(&SkeletonSpec::finite(spec.scale().clone(), layers)?))
    }
}

pub fn parse_spec(path: &Path) -> anyhow::Result<SkeletonSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    SpecFile::from_json(&text)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_out_of_range() {
        let text = r#"{"version": 1, "backend": "finite", "scale": [4, 2],
            "layers": [{"level": 1, "filled": [{"residue": 5, "symbol": 1}]}]}"#;
        let err = SpecFile::from_json(text).unwrap().build().unwrap_err();
        assert_eq!(err.to_string(), "residue 5 ≥ p_1 = 4");
    }

    #[test]
    fn duplicate_fill_is_rejected() {
        let text = r#"{"version": 1, "backend": "finite", "scale": [4],
            "layers": [{"level": 1, "filled": [{"residue": 1, "symbol": 1}, {"residue": 1, "symbol": 0}]}]}"#;
        assert!(SpecFile::from_json(text).unwrap().build().is_err());
    }

    #[test]
    fn malformed_documents() {
        assert!(SpecFile::from_json("{}").is_err());
        assert!(SpecFile::from_json(r#"{"version": 1, "backend": "finite", "scale": [2], "extra": 1}"#).is_err());
        let bad_symbol = r#"{"version": 1, "backend": "finite", "scale": [2],
            "layers": [{"level": 1, "filled": [{"residue": 0, "symbol": 2}]}]}"#;
        assert!(SpecFile::from_json(bad_symbol).is_err());
        let order = r#"{"version": 1, "backend": "finite", "scale": [2, 2],
            "layers": [{"level": 2, "filled": []}, {"level": 1, "filled": []}]}"#;
        assert!(SpecFile::from_json(order).unwrap().build().is_err());
        let version = r#"{"version": 2, "backend": "ruled", "family": "half-dim", "depth": 3}"#;
        assert!(SpecFile::from_json(version).unwrap().build().is_err());
        let family = r#"{"version": 1, "backend": "ruled", "family": "nope", "depth": 3}"#;
        assert!(SpecFile::from_json(family).unwrap().build().is_err());
    }

    #[test]
    fn ruled_presets_build() {
        let text = r#"{"version": 1, "backend": "ruled", "family": "fat-cantor", "params": {}, "depth": 6, "layers": []}"#;
        let spec = SpecFile::from_json(text).unwrap().build().unwrap();
        assert_eq!(spec.depth(), 6);
        assert_eq!(spec.scale().radix(6), 128);
    }

    #[test]
    fn preset_file_matches_generator() {
        let doc = SpecFile::emit(&Preset::RulerAlt.generate(8));
        let spec = SpecFile::from_json(&doc.to_json()).unwrap().build().unwrap();
        let direct = Preset::RulerAlt.generate(8);
        for level in 1..=8 {
            let a: Vec<_> = spec.layer(level).unwrap().collect();
            let b: Vec<_> = direct.layer(level).unwrap().collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn emit_round_trips() {
        for preset in Preset::ALL {
            let ruled = SpecFile::emit(&preset.generate(4));
            assert_eq!(SpecFile::emit(&ruled.build().unwrap()), ruled);
            let finite = SpecFile::emit_finite(&preset.generate(3)).unwrap();
            let again = SpecFile::from_json(&finite.to_json()).unwrap();
            assert_eq!(SpecFile::emit(&again.build().unwrap()), finite);
            assert_eq!(again, finite);
        }
        let custom = HoleTreeRule {
            layering: toeplitz_core::families::Layering::Cyclic(vec![toeplitz_core::families::LevelRule::new(5, [1, 3])]),
            coverage_from: Some(1),
        };
        let doc = SpecFile::emit(&generate(&custom, 5).unwrap());
        assert_eq!(doc.family.as_deref(), Some("rule"));
        let back = SpecFile::from_json(&doc.to_json()).unwrap();
        assert_eq!(SpecFile::emit(&back.build().unwrap()), doc);
    }

    #[test]
    fn ruled_layers_are_checked() {
        let ok = r#"{"version": 1, "backend": "ruled", "family": "ruler-alt", "depth": 4,
            "layers": [{"level": 2, "filled": [{"residue": 3, "symbol": 0}]}]}"#;
        assert!(SpecFile::from_json(ok).unwrap().build().is_ok());
        let bad = r#"{"version": 1, "backend": "ruled", "family": "ruler-alt", "depth": 4,
            "layers": [{"level": 2, "filled": [{"residue": 1, "symbol": 0}]}]}"#;
        assert!(SpecFile::from_json(bad).unwrap().build().is_err());
    }

    #[test]
    fn large_residues_use_strings() {
        let r = Residue(BigUint::from(u64::MAX) + 1u8);
        assert_eq!(serde_json::to_string(&r).unwrap(), "\"18446744073709551616\"");
        let back: Residue = serde_json::from_str("\"18446744073709551616\"").unwrap();
        assert_eq!(back, r);
        assert_eq!(serde_json::to_string(&Residue(7u8.into())).unwrap(), "7");
    }
}
