//! Python bindings.
//!
//! Binary values cross the boundary as `bytes`; bulletins travel as their
//! canonical JSON text.

use std::collections::BTreeMap;
use std::sync::Arc;

use msss_core::store;
use msss_core::{
    AccessStructure, Block, Error, HashCounter as CoreCounter, Hasher, Participant, Role,
    SchemeParams as CoreParams, Secret, Share as CoreShare,
};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

create_exception!(
    msss,
    MsssError,
    PyValueError,
    "Any error raised by the scheme."
);
create_exception!(
    msss,
    ReconstructionFailed,
    MsssError,
    "Raised when a session has missing or rejected members; args are (missing, rejected)."
);

fn to_py(err: Error) -> PyErr {
    match err {
        Error::ReconstructionFailed(report) => {
            let missing: Vec<u32> = report.missing.into_iter().collect();
            let rejected: Vec<u32> = report.rejected.into_iter().collect();
            ReconstructionFailed::new_err((missing, rejected))
        }
        other => MsssError::new_err(other.to_string()),
    }
}

fn block(bytes: &[u8]) -> Block {
    Block::from_bytes(bytes.to_vec())
}

/// Shared per-role hash tally. Pass it to operations through `counter=`.
#[pyclass(module = "msss", frozen, skip_from_py_object)]
#[derive(Clone)]
struct HashCounter {
    inner: Arc<CoreCounter>,
}

#[pymethods]
impl HashCounter {
    #[new]
    fn new() -> Self {
        HashCounter {
            inner: CoreCounter::new(),
        }
    }

    #[getter]
    fn dealer(&self) -> u64 {
        self.inner.get(Role::Dealer)
    }

    #[getter]
    fn participant(&self) -> u64 {
        self.inner.get(Role::Participant)
    }

    #[getter]
    fn combiner(&self) -> u64 {
        self.inner.get(Role::Combiner)
    }

    fn reset(&self) {
        self.inner.reset();
    }

    fn __repr__(&self) -> String {
        format!(
            "HashCounter(dealer={}, participant={}, combiner={})",
            self.dealer(),
            self.participant(),
            self.combiner()
        )
    }
}

fn hasher(params: &CoreParams, role: Role, counter: Option<&HashCounter>) -> PyResult<Hasher> {
    let counter = counter.map_or_else(CoreCounter::new, |c| c.inner.clone());
    Hasher::with_counter(params, role, counter).map_err(to_py)
}

#[pyclass(module = "msss", frozen, skip_from_py_object)]
#[derive(Clone)]
struct SchemeParams {
    inner: CoreParams,
}

#[pymethods]
impl SchemeParams {
    /// `instance_id` (16 bytes) distinguishes otherwise identical instances.
    #[new]
    #[pyo3(signature = (q, n, k_max, t_max, hash_id="sha-256", instance_id=None, insecure_test_mode=false))]
    fn new(
        q: u32,
        n: u32,
        k_max: u32,
        t_max: u32,
        hash_id: &str,
        instance_id: Option<&[u8]>,
        insecure_test_mode: bool,
    ) -> PyResult<Self> {
        let params = if insecure_test_mode {
            CoreParams::new_insecure(q, n, k_max, t_max, hash_id)
        } else {
            CoreParams::new(q, n, k_max, t_max, hash_id)
        }
        .map_err(to_py)?;
        let params = match instance_id {
            Some(id) => params.with_instance_id(block(id)).map_err(to_py)?,
            None => params,
        };
        Ok(SchemeParams { inner: params })
    }

    #[getter]
    fn q(&self) -> u32 {
        self.inner.q()
    }
    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }
    #[getter]
    fn k_max(&self) -> u32 {
        self.inner.k_max()
    }
    #[getter]
    fn t_max(&self) -> u32 {
        self.inner.t_max()
    }
    #[getter]
    fn l(&self) -> u32 {
        self.inner.l()
    }
    #[getter]
    fn m(&self) -> u32 {
        self.inner.m()
    }
    #[getter]
    fn version(&self) -> u64 {
        self.inner.version()
    }
    #[getter]
    fn hash_id(&self) -> String {
        self.inner.hash_id().to_string()
    }

    fn fingerprint(&self) -> String {
        store::scheme_fingerprint(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "SchemeParams(q={}, n={}, k_max={}, t_max={}, l={}, m={}, version={})",
            self.q(),
            self.n(),
            self.k_max(),
            self.t_max(),
            self.l(),
            self.m(),
            self.version()
        )
    }
}

/// A participant's private share. `repr` never shows `x`.
#[pyclass(module = "msss", frozen, from_py_object)]
#[derive(Clone)]
struct Share {
    inner: CoreShare,
}

#[pymethods]
impl Share {
    #[new]
    fn new(params: &SchemeParams, participant: u32, x: &[u8]) -> PyResult<Self> {
        let inner = CoreShare::new(&params.inner, participant, block(x)).map_err(to_py)?;
        Ok(Share { inner })
    }

    #[getter]
    fn participant(&self) -> u32 {
        self.inner.participant
    }

    #[getter]
    fn x(&self) -> Vec<u8> {
        self.inner.x.as_bytes().to_vec()
    }

    fn __repr__(&self) -> String {
        format!(
            "Share(participant={}, x=<redacted>)",
            self.inner.participant
        )
    }
}

#[pyclass(module = "msss", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Bulletin {
    inner: msss_core::Bulletin,
}

fn structure(index: u32, sets: Vec<Vec<u32>>) -> AccessStructure {
    AccessStructure::new(index, sets)
}

#[pymethods]
impl Bulletin {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Bulletin {
            inner: store::decode_bulletin(text).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        store::encode_bulletin(&self.inner).map_err(to_py)
    }

    #[getter]
    fn params(&self) -> SchemeParams {
        SchemeParams {
            inner: self.inner.params.clone(),
        }
    }

    #[getter]
    fn version(&self) -> u64 {
        self.inner.version()
    }

    #[getter]
    fn secret_count(&self) -> u32 {
        self.inner.secret_count()
    }

    /// Member lists of every qualified set of secret `i`, in order.
    fn qualified_sets(&self, i: u32) -> PyResult<Vec<Vec<u32>>> {
        let s = self
            .inner
            .structure(i)
            .ok_or_else(|| to_py(Error::UnknownSecret(i)))?;
        Ok(s.qualified_sets.iter().map(|q| q.members.clone()).collect())
    }

    fn public_share(&self, i: u32, j: u32) -> PyResult<Vec<u8>> {
        self.inner
            .public_share(i, j)
            .map(|r| r.value.as_bytes().to_vec())
            .ok_or_else(|| {
                to_py(Error::UnknownRow {
                    secret_index: i,
                    set_position: j,
                })
            })
    }

    fn commitment(&self, i: u32) -> PyResult<Vec<u8>> {
        self.inner
            .commitment(i)
            .map(|c| c.digest.as_bytes().to_vec())
            .ok_or_else(|| to_py(Error::UnknownSecret(i)))
    }

    /// Adds secret `k + 1` with the given qualified sets. Shares are unchanged.
    #[pyo3(signature = (shares, secret, sets, counter=None))]
    fn add_secret(
        &self,
        shares: Vec<Share>,
        secret: &[u8],
        sets: Vec<Vec<u32>>,
        counter: Option<&HashCounter>,
    ) -> PyResult<Bulletin> {
        let params = &self.inner.params;
        let index = self.inner.secret_count() + 1;
        let secret = Secret {
            index,
            value: block(secret),
        };
        let shares: Vec<CoreShare> = shares.into_iter().map(|s| s.inner).collect();
        let h = hasher(params, Role::Dealer, counter)?;
        let next =
            msss_core::add_secret(&h, &self.inner, &shares, &secret, &structure(index, sets))
                .map_err(to_py)?;
        Ok(Bulletin { inner: next })
    }

    /// Replaces the qualified sets of secret `index`, whose value must be given again.
    #[pyo3(signature = (shares, index, secret, sets, counter=None))]
    fn replace_structure(
        &self,
        shares: Vec<Share>,
        index: u32,
        secret: &[u8],
        sets: Vec<Vec<u32>>,
        counter: Option<&HashCounter>,
    ) -> PyResult<Bulletin> {
        let params = &self.inner.params;
        let secret = Secret::new(params, index, block(secret)).map_err(to_py)?;
        let shares: Vec<CoreShare> = shares.into_iter().map(|s| s.inner).collect();
        let h = hasher(params, Role::Dealer, counter)?;
        let next = msss_core::replace_access_structure(
            &h,
            &self.inner,
            &shares,
            &secret,
            &structure(index, sets),
        )
        .map_err(to_py)?;
        Ok(Bulletin { inner: next })
    }

    fn __eq__(&self, other: &Bulletin) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Bulletin(version={}, secrets={}, rows={})",
            self.inner.version(),
            self.inner.secret_count(),
            self.inner.public_shares.len()
        )
    }
}

/// Draws `n` shares. A `seed` (up to 32 bytes) makes the draw reproducible
/// and is meant for tests only.
#[pyfunction]
#[pyo3(signature = (params, seed=None))]
fn issue_shares(params: &SchemeParams, seed: Option<&[u8]>) -> PyResult<Vec<Share>> {
    let shares = match seed {
        Some(seed) if seed.len() > 32 => {
            return Err(MsssError::new_err("seed must be at most 32 bytes"))
        }
        Some(seed) => {
            let mut key = [0u8; 32];
            key[..seed.len()].copy_from_slice(seed);
            msss_core::issue_shares(&params.inner, &mut ChaCha20Rng::from_seed(key))
        }
        None => msss_core::issue_shares(&params.inner, &mut rand::rngs::OsRng),
    }
    .map_err(to_py)?;
    Ok(shares.into_iter().map(|inner| Share { inner }).collect())
}

/// `secrets[i - 1]` is secret `i`; `structures[i - 1]` lists its qualified sets.
#[pyfunction]
#[pyo3(signature = (params, secrets, structures, shares, labels=None, counter=None))]
fn build_bulletin(
    params: &SchemeParams,
    secrets: Vec<Vec<u8>>,
    structures: Vec<Vec<Vec<u32>>>,
    shares: Vec<Share>,
    labels: Option<Vec<String>>,
    counter: Option<&HashCounter>,
) -> PyResult<Bulletin> {
    let p = &params.inner;
    let secrets = secrets
        .iter()
        .enumerate()
        .map(|(k, v)| Secret::new(p, k as u32 + 1, block(v)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(to_py)?;
    let structures: Vec<AccessStructure> = structures
        .into_iter()
        .enumerate()
        .map(|(k, sets)| structure(k as u32 + 1, sets))
        .collect();
    let roster = match labels {
        Some(labels) => Participant::roster(labels),
        None => Participant::default_roster(p.n()),
    };
    let shares: Vec<CoreShare> = shares.into_iter().map(|s| s.inner).collect();
    let h = hasher(p, Role::Dealer, counter)?;
    let inner =
        msss_core::build_bulletin(&h, p, &roster, &secrets, &structures, &shares).map_err(to_py)?;
    Ok(Bulletin { inner })
}

#[pyfunction]
#[pyo3(signature = (share, bulletin, i, j, counter=None))]
fn derive_pseudo_share(
    share: &Share,
    bulletin: &Bulletin,
    i: u32,
    j: u32,
    counter: Option<&HashCounter>,
) -> PyResult<Vec<u8>> {
    let h = hasher(&bulletin.inner.params, Role::Participant, counter)?;
    let pseudo =
        msss_core::derive_pseudo_share(&h, &share.inner, i, j, &bulletin.inner).map_err(to_py)?;
    Ok(pseudo.value.as_bytes().to_vec())
}

#[pyfunction]
#[pyo3(signature = (bulletin, i, candidate, counter=None))]
fn verify_secret(
    bulletin: &Bulletin,
    i: u32,
    candidate: &[u8],
    counter: Option<&HashCounter>,
) -> PyResult<bool> {
    let commitment = bulletin
        .inner
        .commitment(i)
        .ok_or_else(|| to_py(Error::UnknownSecret(i)))?;
    let h = hasher(&bulletin.inner.params, Role::Participant, counter)?;
    Ok(msss_core::verify_secret(&h, candidate, commitment).is_accept())
}

#[pyfunction]
#[pyo3(signature = (bulletin, participant, i, j, value, counter=None))]
fn verify_pseudo_share(
    bulletin: &Bulletin,
    participant: u32,
    i: u32,
    j: u32,
    value: &[u8],
    counter: Option<&HashCounter>,
) -> PyResult<bool> {
    let h = hasher(&bulletin.inner.params, Role::Combiner, counter)?;
    let verdict = msss_core::verify_pseudo_share(&h, &bulletin.inner, participant, i, j, value)
        .map_err(to_py)?;
    Ok(verdict.is_accept())
}

/// Verifies every member's submission and returns the secret, or raises
/// `ReconstructionFailed((missing, rejected))`.
#[pyfunction]
#[pyo3(signature = (bulletin, i, j, submissions, counter=None))]
fn reconstruct(
    bulletin: &Bulletin,
    i: u32,
    j: u32,
    submissions: BTreeMap<u32, Vec<u8>>,
    counter: Option<&HashCounter>,
) -> PyResult<Vec<u8>> {
    let mut session =
        msss_core::ReconstructionSession::open(&bulletin.inner, i, j).map_err(to_py)?;
    for (participant, value) in submissions {
        session
            .submit(participant, Block::from_bytes(value))
            .map_err(to_py)?;
    }
    let h = hasher(&bulletin.inner.params, Role::Combiner, counter)?;
    let secret = msss_core::reconstruct(&h, &bulletin.inner, &mut session).map_err(to_py)?;
    Ok(secret.into_bytes())
}

#[pymodule]
fn msss(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<SchemeParams>()?;
    m.add_class::<Share>()?;
    m.add_class::<Bulletin>()?;
    m.add_class::<HashCounter>()?;
    m.add_function(wrap_pyfunction!(issue_shares, m)?)?;
    m.add_function(wrap_pyfunction!(build_bulletin, m)?)?;
    m.add_function(wrap_pyfunction!(derive_pseudo_share, m)?)?;
    m.add_function(wrap_pyfunction!(verify_secret, m)?)?;
    m.add_function(wrap_pyfunction!(verify_pseudo_share, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct, m)?)?;
    m.add("MsssError", m.py().get_type::<MsssError>())?;
    m.add(
        "ReconstructionFailed",
        m.py().get_type::<ReconstructionFailed>(),
    )?;
    Ok(())
}
