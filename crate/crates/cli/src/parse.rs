//! Text forms accepted on the command line for groups and spaces.

use std::sync::Arc;

use dlgeo::qi::Rational;
use dlgeo::{FiniteGroup, Horosphere};

use crate::CliError;

/// `cyclic:q`, `cyclic:q^k`, `table:FILE` or `table:FILE^k`.
#[derive(Clone, Debug)]
pub struct GroupArg {
    pub base: Arc<FiniteGroup>,
    pub power: usize,
    pub text: String,
}

impl GroupArg {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| CliError::usage(format!("group {s:?} must look like cyclic:q or table:FILE")))?;
        let (body, power) = match rest.rsplit_once('^') {
            Some((b, p)) => {
                let p = p.parse::<usize>().map_err(|_| CliError::usage(format!("bad exponent in {s:?}")))?;
                (b, p)
            }
            None => (rest, 1),
        };
        if power == 0 {
            return Err(CliError::usage(format!("exponent in {s:?} must be positive")));
        }
        let base = match kind {
            "cyclic" => {
                let q = body.parse::<usize>().map_err(|_| CliError::usage(format!("bad order in {s:?}")))?;
                FiniteGroup::cyclic(q)?
            }
            "table" => FiniteGroup::load(body)?,
            _ => return Err(CliError::usage(format!("unknown group kind {kind:?} in {s:?}"))),
        };
        Ok(GroupArg { base: Arc::new(base), power, text: s.to_string() })
    }

    /// The group itself, with the power expanded.
    pub fn group(&self) -> Result<Arc<FiniteGroup>, CliError> {
        if self.power == 1 {
            Ok(self.base.clone())
        } else {
            Ok(Arc::new(self.base.direct_power(self.power)?))
        }
    }
}

/// Picks the horosphere from `--dl q,r`, or `--group` with an optional `--right`.
pub fn horosphere(group: Option<&str>, right: Option<&str>, dl: Option<&str>) -> Result<Horosphere, CliError> {
    match (group, right, dl) {
        (None, None, Some(d)) => {
            let (q, r) = d.split_once(',').ok_or_else(|| CliError::usage(format!("--dl expects q,r, got {d:?}")))?;
            let parse =
                |t: &str| t.trim().parse::<usize>().map_err(|_| CliError::usage(format!("bad --dl value {d:?}")));
            Ok(Horosphere::dl(parse(q)?, parse(r)?)?)
        }
        (Some(g), None, None) => Ok(Horosphere::lamplighter(GroupArg::parse(g)?.group()?)),
        (Some(g), Some(r), None) => Ok(Horosphere::mixed(GroupArg::parse(g)?.group()?, GroupArg::parse(r)?.group()?)),
        (None, Some(_), _) => Err(CliError::usage("--right needs --group")),
        (Some(_), _, Some(_)) => Err(CliError::usage("give either --group or --dl, not both")),
        (None, None, None) => Err(CliError::usage("a space is required: --group G or --dl q,r")),
    }
}

/// Comma-separated rationals such as `1,9/8,2`.
pub fn grid(s: &str) -> Result<Vec<Rational>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<Rational>().map_err(|_| CliError::usage(format!("bad rational {t:?} in grid"))))
        .collect()
}
