use super::{AttRankParams, AttentionMode, SUM_SLACK};
use crate::error::{Error, Result};

/// AttRank parameters as given by the user, any of which may be missing.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PartialParams {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub eta: Option<f64>,
    pub y: Option<u32>,
    pub attention_mode: Option<AttentionMode>,
}

impl PartialParams {
    /// Values set in `over` win.
    pub fn merged(self, over: PartialParams) -> PartialParams {
        PartialParams {
            alpha: over.alpha.or(self.alpha),
            beta: over.beta.or(self.beta),
            gamma: over.gamma.or(self.gamma),
            eta: over.eta.or(self.eta),
            y: over.y.or(self.y),
            attention_mode: over.attention_mode.or(self.attention_mode),
        }
    }

    /// Fills a single missing mixing coefficient so that the three sum to
    /// one. `eta` defaults to 0, `y` to 1.
    pub fn complete(&self) -> Result<AttRankParams> {
        let given = [self.alpha, self.beta, self.gamma];
        let known: f64 = given.iter().flatten().sum();
        let missing = given.iter().filter(|v| v.is_none()).count();
        let names = ["alpha", "beta", "gamma"];
        let label = |pick: &dyn Fn(usize) -> bool| {
            (0..3).filter(|&k| pick(k)).map(|k| names[k]).collect::<Vec<_>>().join("+")
        };
        let (alpha, beta, gamma) = match missing {
            0 => (self.alpha.unwrap(), self.beta.unwrap(), self.gamma.unwrap()),
            1 => {
                if known > 1.0 + SUM_SLACK {
                    let present = label(&|k| given[k].is_some());
                    return Err(Error::InvalidParameter(format!("{present} exceeds 1")));
                }
                let rest = (1.0 - known).max(0.0);
                (
                    self.alpha.unwrap_or(rest),
                    self.beta.unwrap_or(rest),
                    self.gamma.unwrap_or(rest),
                )
            }
            _ => {
                let absent = label(&|k| given[k].is_none());
                return Err(Error::InvalidParameter(format!(
                    "at least two of alpha, beta, gamma are required (missing {absent})"
                )));
            }
        };
        let p = AttRankParams {
            alpha,
            beta,
            gamma,
            eta: self.eta.unwrap_or(0.0),
            y: self.y.unwrap_or(1),
            attention_mode: self.attention_mode.unwrap_or_default(),
        };
        p.validate()?;
        Ok(p)
    }
}

/// Contents of a `key = value` AttRank configuration file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AttRankConfig {
    pub params: PartialParams,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
}

impl AttRankConfig {
    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = AttRankConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let line_no = idx + 1;
            let bad = |reason: String| Error::MalformedRecord { line: line_no, reason };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let real = || value.parse::<f64>().map_err(|_| bad(format!("bad number `{value}`")));
            match key {
                "alpha" => cfg.params.alpha = Some(real()?),
                "beta" => cfg.params.beta = Some(real()?),
                "gamma" => cfg.params.gamma = Some(real()?),
                "eta" => cfg.params.eta = Some(real()?),
                "tol" => cfg.tol = Some(real()?),
                "y" => {
                    cfg.params.y = Some(value.parse().map_err(|_| bad(format!("bad year count `{value}`")))?)
                }
                "max_iter" => {
                    cfg.max_iter = Some(value.parse().map_err(|_| bad(format!("bad count `{value}`")))?)
                }
                "attention_mode" => cfg.params.attention_mode = Some(value.parse()?),
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_inferred() {
        let p = PartialParams {
            alpha: Some(0.3),
            beta: Some(0.4),
            ..Default::default()
        }
        .complete()
        .unwrap();
        assert!((p.gamma - 0.3).abs() < 1e-15);
    }

    #[test]
    fn overfull_reports_sum() {
        let err = PartialParams {
            alpha: Some(0.6),
            beta: Some(0.6),
            ..Default::default()
        }
        .complete()
        .unwrap_err();
        assert!(err.to_string().contains("alpha+beta exceeds 1"), "{err}");
    }

    #[test]
    fn needs_two_coefficients() {
        let err = PartialParams {
            alpha: Some(0.6),
            ..Default::default()
        }
        .complete()
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn parse_file_and_merge() {
        let cfg = AttRankConfig::parse(
            "# tuned for hep-th\nalpha = 0.3\nbeta=0.4\n\ny = 1\neta = -0.48 # fitted\n\
             attention_mode = weighted_reference\ntol = 1e-10\nmax_iter = 50\n",
        )
        .unwrap();
        assert_eq!(cfg.tol, Some(1e-10));
        assert_eq!(cfg.max_iter, Some(50));
        let flags = PartialParams {
            y: Some(3),
            ..Default::default()
        };
        let p = cfg.params.merged(flags).complete().unwrap();
        assert_eq!(p.y, 3);
        assert_eq!(p.eta, -0.48);
        assert_eq!(p.attention_mode, AttentionMode::WeightedReference);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            AttRankConfig::parse("alpha 0.3"),
            Err(Error::MalformedRecord { line: 1, .. })
        ));
        assert!(matches!(
            AttRankConfig::parse("\nfoo = 1"),
            Err(Error::MalformedRecord { line: 2, .. })
        ));
        assert!(AttRankConfig::parse("attention_mode = nope").is_err());
    }
}
