use std::path::PathBuf;

use workbench_core::flowltl::DEFAULT_STATE_CAP;
use workbench_core::game::GameOptions;

/// Server settings, usually read from `WORKBENCH_*` environment variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub port: u16,
    pub max_jobs: usize,
    pub cache_dir: Option<PathBuf>,
    /// Overrides both the checker and the game state cap.
    pub state_cap: Option<usize>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            port: 8080,
            max_jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            cache_dir: None,
            state_cap: None,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("{var}: cannot parse `{value}`")]
pub struct ConfigError {
    pub var: &'static str,
    pub value: String,
}

impl Config {
    pub fn from_env() -> Result<Self, ConfigError> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        fn num<T: std::str::FromStr>(var: &'static str, v: String) -> Result<T, ConfigError> {
            v.trim().parse().map_err(|_| ConfigError { var, value: v })
        }
        let mut c = Config::default();
        if let Some(v) = get("WORKBENCH_PORT") {
            c.port = num("WORKBENCH_PORT", v)?;
        }
        if let Some(v) = get("WORKBENCH_MAX_JOBS") {
            c.max_jobs = num("WORKBENCH_MAX_JOBS", v.clone())?;
            if c.max_jobs == 0 {
                return Err(ConfigError { var: "WORKBENCH_MAX_JOBS", value: v });
            }
        }
        if let Some(v) = get("WORKBENCH_CACHE_DIR") {
            if !v.is_empty() {
                c.cache_dir = Some(PathBuf::from(v));
            }
        }
        if let Some(v) = get("WORKBENCH_STATE_CAP") {
            c.state_cap = Some(num("WORKBENCH_STATE_CAP", v)?);
        }
        Ok(c)
    }

    pub fn check_cap(&self) -> usize {
        self.state_cap.unwrap_or(DEFAULT_STATE_CAP)
    }

    pub fn game_cap(&self) -> usize {
        self.state_cap.unwrap_or(GameOptions::default().state_cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let c = Config::from_lookup(|_| None).unwrap();
        assert_eq!(c.port, 8080);
        assert!(c.max_jobs >= 1);
        assert_eq!(c.check_cap(), 10_000_000);
        assert_eq!(c.game_cap(), 1_000_000);

        let c = Config::from_lookup(|k| match k {
            "WORKBENCH_PORT" => Some("9000".into()),
            "WORKBENCH_MAX_JOBS" => Some("3".into()),
            "WORKBENCH_CACHE_DIR" => Some("/tmp/x".into()),
            "WORKBENCH_STATE_CAP" => Some("500".into()),
            _ => None,
        })
        .unwrap();
        assert_eq!(c.port, 9000);
        assert_eq!(c.max_jobs, 3);
        assert_eq!(c.cache_dir, Some(PathBuf::from("/tmp/x")));
        assert_eq!((c.check_cap(), c.game_cap()), (500, 500));
    }

    #[test]
    fn bad_values() {
        let err = Config::from_lookup(|k| (k == "WORKBENCH_PORT").then(|| "http".into())).unwrap_err();
        assert_eq!(err.var, "WORKBENCH_PORT");
        assert!(Config::from_lookup(|k| (k == "WORKBENCH_MAX_JOBS").then(|| "0".into())).is_err());
    }
}
