//! Instance files: TOML documents holding an [`InstanceSpec`].

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use pdfw_core::problems::{InstanceSpec, LoadedInstance};

pub fn read_spec(path: &Path) -> Result<InstanceSpec> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading instance file {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing instance file {}", path.display()))
}

pub fn load(path: &Path) -> Result<LoadedInstance> {
    read_spec(path)?
        .load()
        .with_context(|| format!("validating instance file {}", path.display()))
}

pub fn to_toml(spec: &InstanceSpec) -> Result<String> {
    toml::to_string(spec).context("serializing instance")
}

pub fn write_spec(path: &Path, spec: &InstanceSpec) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
    }
    fs::write(path, to_toml(spec)?).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use pdfw_core::distributed::make_cycle_consensus;
    use pdfw_core::problems::{make_convex_scheduling, make_sigmoidal_scheduling};

    #[test]
    fn toml_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for inst in [make_convex_scheduling(2, 2, 1).unwrap(), make_sigmoidal_scheduling(2, 2, 1).unwrap()] {
            let spec = InstanceSpec::from_instance(&inst).unwrap();
            let path = dir.path().join("inst.toml");
            write_spec(&path, &spec).unwrap();
            let loaded = load(&path).unwrap();
            assert_eq!(loaded.instance.decision_sets(), inst.decision_sets());
            assert_eq!(loaded.instance.constraints(), inst.constraints());
        }
    }

    #[test]
    fn distributed_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let prob = make_cycle_consensus(4, 2, 0).unwrap();
        let spec = InstanceSpec::from_distributed("cycle", &prob).unwrap();
        let path = dir.path().join("cycle.toml");
        write_spec(&path, &spec).unwrap();
        let loaded = load(&path).unwrap();
        assert_eq!(loaded.distributed.unwrap().graph, prob.graph);
    }

    #[test]
    fn hand_written_file() {
        let text = r#"
version = 1
name = "segment"
dim = 1

[[states]]
label = "good"
probability = 0.5
set = { kind = "finite_vertices", vertices = [[0.0], [1.0]] }

[[states]]
label = "bad"
probability = 0.5
set = { kind = "finite_vertices", vertices = [[0.0], [0.4]] }

[objective]
kind = "quadratic"
target = [0.3]
weight = 1.0

[constraints]
rows = [[1.0]]
rhs = [0.5]

[certificates]
slater_margin = 0.5
gamma_star = [0.3]
"#;
        let spec: InstanceSpec = toml::from_str(text).unwrap();
        let loaded = spec.load().unwrap();
        assert_eq!(loaded.instance.n_states(), 2);
        assert!((loaded.slater.unwrap().margin - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = "version = 1\nname = \"x\"\ndim = 1\nstates = []\ncolour = 3\n";
        assert!(toml::from_str::<InstanceSpec>(text).is_err());
    }
}
