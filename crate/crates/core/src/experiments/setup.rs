//! Domain descriptions that can be stored in a manifest and rebuilt later.

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::greater_than::GtConfig;
use crate::domain::wellbeing::user::{generate_synthetic_users, users_fingerprint};
use crate::domain::wellbeing::{
    load_catalog, load_users, Catalog, OperatorConfig, Sampling, UserProfile, WellbeingDomain,
};
use crate::error::{Error, Result};

/// Where the user pool comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum UserSource {
    Synthetic { count: usize, seed: u64 },
    File { path: PathBuf },
}

impl Default for UserSource {
    fn default() -> Self {
        UserSource::Synthetic {
            count: 100,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WellbeingSpec {
    /// Catalog file; `None` selects the built-in demo catalog.
    pub catalog: Option<PathBuf>,
    pub users: UserSource,
    /// The user recommendations are evolved for.
    pub user_id: u32,
    pub operators: OperatorConfig,
    pub sampling: Sampling,
}

/// Loaded catalog and user pool with their fingerprints.
#[derive(Clone, Debug)]
pub struct WellbeingInputs {
    pub catalog: Arc<Catalog>,
    pub users: Vec<UserProfile>,
    pub catalog_fingerprint: String,
    pub users_fingerprint: String,
}

impl WellbeingSpec {
    pub fn load(&self) -> Result<WellbeingInputs> {
        let catalog = match &self.catalog {
            Some(path) => load_catalog(path)?,
            None => Catalog::demo(),
        };
        let users = match &self.users {
            UserSource::Synthetic { count, seed } => {
                generate_synthetic_users(*count, *seed, &catalog)?
            }
            UserSource::File { path } => load_users(path)?,
        };
        Ok(WellbeingInputs {
            catalog_fingerprint: catalog.fingerprint(),
            users_fingerprint: users_fingerprint(&users),
            catalog: Arc::new(catalog),
            users,
        })
    }

    /// Builds the domain for the configured user with the given operators.
    pub fn domain(
        &self,
        inputs: &WellbeingInputs,
        operators: OperatorConfig,
    ) -> Result<WellbeingDomain> {
        let user = inputs
            .users
            .iter()
            .find(|u| u.id == self.user_id)
            .ok_or_else(|| {
                Error::config(format!("user {} is not in the user pool", self.user_id))
            })?;
        WellbeingDomain::new(
            Arc::clone(&inputs.catalog),
            user.clone(),
            &inputs.users,
            operators,
            self.sampling.clone(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum DomainSpec {
    GreaterThan(GtConfig),
    Wellbeing(WellbeingSpec),
}

impl DomainSpec {
    pub fn name(&self) -> &'static str {
        match self {
            DomainSpec::GreaterThan(_) => "greater-than",
            DomainSpec::Wellbeing(_) => "wellbeing",
        }
    }
}
