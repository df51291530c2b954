//! Ready-made configurations, embedded in the binary.

use crate::config::RunConfig;
use crate::error::CliError;

pub const RECIPES: &[(&str, &str)] = &[
    ("table1_col12", include_str!("../recipes/table1_col12.toml")),
    ("table1_col34", include_str!("../recipes/table1_col34.toml")),
    ("table1_col34_mu1", include_str!("../recipes/table1_col34_mu1.toml")),
    ("table2", include_str!("../recipes/table2.toml")),
    ("table2_sigma2", include_str!("../recipes/table2_sigma2.toml")),
    ("fig2", include_str!("../recipes/fig2.toml")),
    ("fig67", include_str!("../recipes/fig67.toml")),
    ("fig67_gauge", include_str!("../recipes/fig67_gauge.toml")),
];

pub fn recipe_text(name: &str) -> Result<&'static str, CliError> {
    RECIPES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| {
            let names: Vec<&str> = RECIPES.iter().map(|(n, _)| *n).collect();
            CliError::config("--recipe", format!("unknown recipe '{name}' (available: {})", names.join(", ")))
        })
}

pub fn recipe(name: &str) -> Result<RunConfig, CliError> {
    RunConfig::from_toml(recipe_text(name)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_recipe_parses() {
        for (name, _) in RECIPES {
            recipe(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn unknown_recipe_lists_the_choices() {
        let err = recipe("nope").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("table2"));
    }
}
