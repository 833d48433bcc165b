//! Where the instance comes from: a file, a named fixture or a generator.

use std::fs::File;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use mvbm_core::{
    fixture, random_instance, FixtureId, FixtureParams, Instance, RandomSpec, Value, ValueMode,
};

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// Instance JSON file.
    #[arg(long, value_name = "FILE")]
    pub instance: Option<PathBuf>,
    /// Named fixture (see `mvbm fixtures list`).
    #[arg(long, value_name = "ID")]
    pub fixture: Option<FixtureId>,
    /// Random instance, e.g. `seed=7,n=3,m=3,b=2,density=0.5,values=ties`.
    #[arg(long, value_name = "SPEC")]
    pub generate: Option<String>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct FixtureArgs {
    /// Epsilon for the fixtures that take one, as `1/1000` or `0.001`.
    #[arg(long)]
    pub eps: Option<Value>,
    /// Seed for the random fixture families.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Agent order for `ex2_order_dependence`, a permutation of `abg`.
    #[arg(long)]
    pub order: Option<String>,
}

impl FixtureArgs {
    pub fn params(&self) -> FixtureParams {
        FixtureParams {
            eps: self.eps.clone(),
            seed: self.seed,
            order: self.order.clone(),
        }
    }
}

/// The loaded instance and the id used for it in output.
pub fn load(source: &SourceArgs, fx: &FixtureArgs) -> Result<(Instance, String)> {
    if let Some(path) = &source.instance {
        let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        let inst =
            Instance::load(file).with_context(|| format!("invalid instance {}", path.display()))?;
        return Ok((inst, path.display().to_string()));
    }
    if let Some(id) = source.fixture {
        let inst = fixture(id, &fx.params())?;
        let mut name = id.to_string();
        if let Some(eps) = &fx.eps {
            name.push_str(&format!("[eps={eps}]"));
        }
        if let Some(seed) = fx.seed {
            name.push_str(&format!("[seed={seed}]"));
        }
        if let Some(order) = &fx.order {
            name.push_str(&format!("[order={order}]"));
        }
        return Ok((inst, name));
    }
    let spec_text = source.generate.as_deref().unwrap_or_default();
    let spec = parse_generate(spec_text)?;
    Ok((random_instance(&spec), format!("generate:{spec_text}")))
}

pub fn parse_generate(text: &str) -> Result<RandomSpec> {
    let mut spec = RandomSpec::new(0, 3, 3);
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let Some((key, value)) = part.split_once('=') else {
            bail!("expected key=value in generator spec, got `{part}`");
        };
        let bad = || format!("bad value `{value}` for `{key}`");
        match key.trim() {
            "seed" => spec.seed = value.parse().with_context(bad)?,
            "n" => spec.agents = value.parse().with_context(bad)?,
            "m" => spec.tasks = value.parse().with_context(bad)?,
            "b" => spec.max_capacity = value.parse().with_context(bad)?,
            "density" => spec.density = value.parse().with_context(bad)?,
            "values" => spec.values = value.parse::<ValueMode>().map_err(anyhow::Error::msg)?,
            other => {
                bail!("unknown generator key `{other}` (expected seed, n, m, b, density, values)")
            }
        }
    }
    if spec.max_capacity == 0 {
        bail!("b must be at least 1");
    }
    if !(spec.density > 0.0 && spec.density <= 1.0) {
        bail!("density must be in (0, 1]");
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_spec() {
        let s = parse_generate("seed=7, n=2,m=4,values=distinct").unwrap();
        assert_eq!((s.seed, s.agents, s.tasks), (7, 2, 4));
        assert_eq!(s.values, ValueMode::Distinct);
        assert!(parse_generate("seed").is_err());
        assert!(parse_generate("k=1").is_err());
        assert!(parse_generate("density=0").is_err());
    }
}
