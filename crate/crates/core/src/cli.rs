//! The `msss` command line.
//!
//! Exit codes: 0 success, 1 validation error, 2 verification failure, 3 I/O error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{CryptoRng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::block::Block;
use crate::combiner::{reconstruct, ReconstructionSession};
use crate::dealer::{add_secret, build_bulletin, replace_access_structure, DealerState};
use crate::error::Error;
use crate::hashing::{HashCounter, Hasher, Role};
use crate::model::{
    validate_access_structure, AccessStructure, Participant, SchemeParams, Secret, StructureRepr,
    INSTANCE_ID_LEN,
};
use crate::participant::{derive_pseudo_share, verify_secret};
use crate::store::{self, scheme_fingerprint};
use crate::testkit::expected_dealer_hashes;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_VERIFICATION: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "msss",
    version,
    about = "Multi-use multi-secret sharing for general access structures"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Create a scheme instance: dealer state plus one share file per participant.
    Setup(SetupArgs),
    /// Publish the bulletin for a list of secrets and access structures.
    Deal(DealArgs),
    /// Derive a participant's pseudo-share for row (i, j).
    Pseudoshare(PseudoshareArgs),
    /// Verify submitted pseudo-shares and recover a secret.
    Reconstruct(ReconstructArgs),
    /// Check a candidate secret against its published commitment.
    VerifySecret(VerifySecretArgs),
    /// Add a secret or replace an access structure without reissuing shares.
    Renew(RenewArgs),
}

#[derive(Args, Debug)]
struct SetupArgs {
    #[arg(long)]
    q: u32,
    #[arg(long)]
    n: u32,
    #[arg(long = "k-max")]
    k_max: u32,
    #[arg(long = "t-max")]
    t_max: u32,
    /// Comma-separated participant labels (default P1..Pn).
    #[arg(long, value_delimiter = ',')]
    labels: Option<Vec<String>>,
    #[arg(long, default_value = crate::model::DEFAULT_HASH_ID)]
    hash: String,
    #[arg(long = "out-dir")]
    out_dir: PathBuf,
    /// Write into a non-empty directory.
    #[arg(long)]
    force: bool,
    /// Allow q below 64 and deterministic seeding. Never use for real secrets.
    #[arg(long = "insecure-test-mode")]
    insecure_test_mode: bool,
    /// Hex seed (up to 32 bytes) for a deterministic generator.
    #[arg(long, requires = "insecure_test_mode")]
    seed: Option<String>,
}

#[derive(Args, Debug)]
struct DealArgs {
    #[arg(long)]
    state: PathBuf,
    /// One hex secret per line; the line number is the secret index.
    #[arg(long)]
    secrets: PathBuf,
    /// JSON list of {"secret_index", "qualified_sets": [[participants]]}.
    #[arg(long)]
    structures: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PseudoshareArgs {
    #[arg(long)]
    share: PathBuf,
    #[arg(long)]
    bulletin: PathBuf,
    /// Secret index i.
    #[arg(long = "secret", visible_alias = "i")]
    secret_index: u32,
    /// Qualified set position j.
    #[arg(long = "set", visible_alias = "j")]
    set_position: u32,
    #[arg(long = "out-dir", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct ReconstructArgs {
    #[arg(long)]
    bulletin: PathBuf,
    #[arg(long = "secret", visible_alias = "i")]
    secret_index: u32,
    #[arg(long = "set", visible_alias = "j")]
    set_position: u32,
    #[arg(long, default_value = store::SESSION_REPORT_FILE)]
    report: PathBuf,
    /// Pseudo-share record files.
    records: Vec<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifySecretArgs {
    #[arg(long)]
    bulletin: PathBuf,
    #[arg(long = "secret", visible_alias = "i")]
    secret_index: u32,
    #[arg(long)]
    candidate: String,
}

#[derive(Args, Debug)]
struct RenewArgs {
    #[arg(long)]
    state: PathBuf,
    #[arg(long)]
    bulletin: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Hex value of a new secret, published as index k + 1.
    #[arg(long = "add-secret", group = "action")]
    add_secret: Option<String>,
    /// Index of the secret whose access structure is replaced.
    #[arg(long = "replace-structure", group = "action")]
    replace_structure: Option<u32>,
    /// Qualified sets as JSON, e.g. '[[1,2],[2,3]]'.
    #[arg(long)]
    sets: String,
}

/// A command failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::Io { .. } => EXIT_IO,
            Error::ReconstructionFailed(_) => EXIT_VERIFICATION,
            _ => EXIT_VALIDATION,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

fn validation(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_VALIDATION,
        message: message.into(),
    }
}

fn io_failure(path: &Path, err: std::io::Error) -> Failure {
    Error::io(path, err).into()
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Setup(a) => cmd_setup(a, out),
        Command::Deal(a) => cmd_deal(a, out),
        Command::Pseudoshare(a) => cmd_pseudoshare(a, out),
        Command::Reconstruct(a) => cmd_reconstruct(a, out),
        Command::VerifySecret(a) => cmd_verify_secret(a, out),
        Command::Renew(a) => cmd_renew(a, out),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

/// `writeln!` for command output; a closed stdout is not an error worth reporting.
macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        { let _ = writeln!($out, $($arg)*); }
    };
}

// ---------------------------------------------------------------- setup

fn cmd_setup(args: SetupArgs, out: &mut dyn Write) -> CmdResult {
    let params = if args.insecure_test_mode {
        SchemeParams::new_insecure(args.q, args.n, args.k_max, args.t_max, &args.hash)?
    } else {
        SchemeParams::new(args.q, args.n, args.k_max, args.t_max, &args.hash)?
    };
    let participants = match &args.labels {
        Some(labels) if labels.len() != args.n as usize => {
            return Err(validation(format!(
                "{} labels given for {} participants",
                labels.len(),
                args.n
            )))
        }
        Some(labels) => Participant::roster(labels.iter().cloned()),
        None => Participant::default_roster(args.n),
    };

    prepare_out_dir(&args.out_dir, args.force)?;

    match &args.seed {
        Some(seed) => {
            let bytes = hex::decode(seed).map_err(|e| validation(format!("--seed: {e}")))?;
            if bytes.len() > 32 {
                return Err(validation("--seed: at most 32 bytes"));
            }
            let mut key = [0u8; 32];
            key[..bytes.len()].copy_from_slice(&bytes);
            let mut rng = ChaCha20Rng::from_seed(key);
            write_setup(params, participants, &args.out_dir, &mut rng, out)
        }
        None => write_setup(
            params,
            participants,
            &args.out_dir,
            &mut rand::rngs::OsRng,
            out,
        ),
    }
}

fn prepare_out_dir(dir: &Path, force: bool) -> Result<(), Failure> {
    if dir.exists() {
        let mut entries = fs::read_dir(dir).map_err(|e| io_failure(dir, e))?;
        if entries.next().is_some() && !force {
            return Err(validation(format!(
                "{} is not empty; pass --force to overwrite",
                dir.display()
            )));
        }
    } else {
        fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    }
    Ok(())
}

fn write_setup<R: RngCore + CryptoRng>(
    params: SchemeParams,
    participants: Vec<Participant>,
    dir: &Path,
    rng: &mut R,
    out: &mut dyn Write,
) -> CmdResult {
    let mut id = [0u8; INSTANCE_ID_LEN];
    rng.try_fill_bytes(&mut id)
        .map_err(|e| Failure::from(Error::EntropyFailure(e.to_string())))?;
    let params = params.with_instance_id(Block::from_bytes(id.to_vec()))?;
    let state = DealerState::setup(params, participants, rng)?;

    store::save_dealer_state(&state, &dir.join(store::DEALER_STATE_FILE))?;
    for share in &state.shares {
        let path = dir.join(store::share_file_name(share.participant));
        store::save_share(&state.params, share, &path)?;
    }
    say!(out, "l = {}", state.params.l());
    say!(out, "m = {}", state.params.m());
    say!(out, "fingerprint = {}", scheme_fingerprint(&state.params));
    say!(
        out,
        "wrote {} and {} share files to {}",
        store::DEALER_STATE_FILE,
        state.shares.len(),
        dir.display()
    );
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------- deal

fn read_secrets(path: &Path, params: &SchemeParams) -> Result<Vec<Secret>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    let mut secrets = Vec::new();
    for (pos, line) in text.lines().enumerate() {
        let index = pos as u32 + 1;
        let line = line.trim();
        if line.is_empty() {
            return Err(validation(format!(
                "{}: line {index} is empty",
                path.display()
            )));
        }
        let value = Block::from_hex(line)
            .map_err(|e| validation(format!("{}: line {index}: {e}", path.display())))?;
        let secret = Secret::new(params, index, value)
            .map_err(|e| validation(format!("{}: line {index}: {e}", path.display())))?;
        secrets.push(secret);
    }
    if secrets.is_empty() {
        return Err(validation(format!("{}: no secrets", path.display())));
    }
    Ok(secrets)
}

fn parse_structures(text: &str, origin: &str) -> Result<Vec<AccessStructure>, Failure> {
    let reprs: Vec<StructureRepr> =
        serde_json::from_str(text).map_err(|e| validation(format!("{origin}: {e}")))?;
    Ok(reprs.into_iter().map(AccessStructure::from).collect())
}

fn check_structure(params: &SchemeParams, structure: &AccessStructure) -> Result<(), Failure> {
    validate_access_structure(params, structure).map_err(|violations| {
        validation(format!(
            "access structure of secret {}: {violations}",
            structure.secret_index
        ))
    })
}

fn print_dealer_hashes(out: &mut dyn Write, hashes: u64, structures: &[&AccessStructure]) {
    say!(out, "dealer hashes: {hashes}");
    for s in structures {
        say!(
            out,
            "  secret {}: 2*{}+1 = {}",
            s.secret_index,
            s.total_membership(),
            expected_dealer_hashes(std::slice::from_ref(*s))
        );
    }
}

fn cmd_deal(args: DealArgs, out: &mut dyn Write) -> CmdResult {
    let mut state = store::load_dealer_state(&args.state)?;
    let secrets = read_secrets(&args.secrets, &state.params)?;
    let text = fs::read_to_string(&args.structures).map_err(|e| io_failure(&args.structures, e))?;
    let structures = parse_structures(&text, &args.structures.display().to_string())?;
    for structure in &structures {
        check_structure(&state.params, structure)?;
    }
    // Re-dealing an instance replaces the bulletin; the version keeps counting.
    let params = if state.secrets.is_empty() {
        state.params.clone()
    } else {
        state.params.bumped()
    };

    let hasher = Hasher::new(&params, Role::Dealer)?;
    let bulletin = build_bulletin(
        &hasher,
        &params,
        &state.participants,
        &secrets,
        &structures,
        &state.shares,
    )?;
    store::save_bulletin(&bulletin, &args.out)?;
    state.secrets = secrets;
    state.params = bulletin.params.clone();
    store::save_dealer_state(&state, &args.state)?;

    print_dealer_hashes(
        out,
        hasher.counter().get(Role::Dealer),
        &bulletin.structures.iter().collect::<Vec<_>>(),
    );
    say!(
        out,
        "published {} secrets, {} rows, {} verification entries to {}",
        bulletin.secret_count(),
        bulletin.public_shares.len(),
        bulletin.verification_table.len(),
        args.out.display()
    );
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------- participant

fn cmd_pseudoshare(args: PseudoshareArgs, out: &mut dyn Write) -> CmdResult {
    let bulletin = store::load_bulletin(&args.bulletin)?;
    let share = store::load_share_for(&args.share, &bulletin.params)?;
    let hasher = Hasher::new(&bulletin.params, Role::Participant)?;
    let pseudo = derive_pseudo_share(
        &hasher,
        &share,
        args.secret_index,
        args.set_position,
        &bulletin,
    )?;
    let path = args.out_dir.join(store::pseudo_share_file_name(
        pseudo.participant,
        pseudo.secret_index,
        pseudo.set_position,
    ));
    store::save_pseudo_share(&bulletin.params, &pseudo, &path)?;
    say!(out, "wrote {}", path.display());
    Ok(EXIT_OK)
}

fn cmd_verify_secret(args: VerifySecretArgs, out: &mut dyn Write) -> CmdResult {
    let bulletin = store::load_bulletin(&args.bulletin)?;
    let commitment = bulletin
        .commitment(args.secret_index)
        .ok_or(Error::UnknownSecret(args.secret_index))?;
    let candidate = Block::from_hex(&args.candidate)?;
    let hasher = Hasher::new(&bulletin.params, Role::Participant)?;
    let verdict = verify_secret(&hasher, candidate.as_bytes(), commitment);
    say!(out, "{verdict}");
    Ok(if verdict.is_accept() {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    })
}

// ---------------------------------------------------------------- combiner

fn cmd_reconstruct(args: ReconstructArgs, out: &mut dyn Write) -> CmdResult {
    let bulletin = store::load_bulletin(&args.bulletin)?;
    let fingerprint = scheme_fingerprint(&bulletin.params);
    let (i, j) = (args.secret_index, args.set_position);
    let mut session = ReconstructionSession::open(&bulletin, i, j)?;

    let mut misbound = Vec::new();
    for path in &args.records {
        let record = store::load_pseudo_share(path)?;
        if record.fingerprint != fingerprint {
            return Err(Error::FingerprintMismatch {
                expected: fingerprint,
                found: record.fingerprint,
            }
            .into());
        }
        let pseudo = record.pseudo_share;
        if (pseudo.secret_index, pseudo.set_position) != (i, j) {
            if !session.members().contains(&pseudo.participant) {
                return Err(validation(format!(
                    "{}: participant {} is not a member of ({i}, {j})",
                    path.display(),
                    pseudo.participant
                )));
            }
            misbound.push((pseudo.participant, pseudo.secret_index, pseudo.set_position));
            continue;
        }
        session.submit(pseudo.participant, pseudo.value)?;
    }

    let counter = HashCounter::new();
    let hasher = Hasher::with_counter(&bulletin.params, Role::Combiner, counter.clone())?;
    let result = match reconstruct(&hasher, &bulletin, &mut session) {
        Ok(secret) if misbound.is_empty() => Some(secret),
        Ok(_) => None,
        Err(Error::ReconstructionFailed(_)) => None,
        Err(other) => return Err(other.into()),
    };

    let mut report =
        store::SessionReport::from_session(&bulletin.params, &session, counter.get(Role::Combiner));
    for &(participant, oi, oj) in &misbound {
        report.reject(participant, format!("record is bound to row ({oi}, {oj})"));
    }
    if result.is_none() {
        report.success = false;
        report.secret = None;
    }
    store::save_session_report(&report, &args.report)?;

    for line in &report.verdicts {
        match &line.reason {
            Some(reason) => say!(
                out,
                "participant {}: {} ({reason})",
                line.participant,
                line.outcome
            ),
            None => say!(out, "participant {}: {}", line.participant, line.outcome),
        }
    }
    say!(out, "combiner hashes: {}", report.combiner_hashes);
    match result {
        Some(secret) => {
            say!(out, "secret: {secret}");
            Ok(EXIT_OK)
        }
        None => {
            say!(
                out,
                "reconstruction failed; report written to {}",
                args.report.display()
            );
            Ok(EXIT_VERIFICATION)
        }
    }
}

// ---------------------------------------------------------------- renewal

fn cmd_renew(args: RenewArgs, out: &mut dyn Write) -> CmdResult {
    let mut state = store::load_dealer_state(&args.state)?;
    let bulletin = store::load_bulletin(&args.bulletin)?;
    if !state.params.same_instance(&bulletin.params) {
        return Err(Error::FingerprintMismatch {
            expected: scheme_fingerprint(&state.params),
            found: scheme_fingerprint(&bulletin.params),
        }
        .into());
    }
    let sets: Vec<Vec<u32>> =
        serde_json::from_str(&args.sets).map_err(|e| validation(format!("--sets: {e}")))?;
    let shares_before = state.shares.clone();
    let hasher = Hasher::new(&bulletin.params, Role::Dealer)?;

    let (next, touched) = match (&args.add_secret, args.replace_structure) {
        (Some(hex_value), None) => {
            let index = bulletin.secret_count() + 1;
            let value = Block::from_hex(hex_value)?;
            let structure = AccessStructure::new(index, sets);
            if index > bulletin.params.k_max() {
                return Err(Error::CapacityExceeded(format!(
                    "bulletin already holds k_max = {} secrets",
                    bulletin.params.k_max()
                ))
                .into());
            }
            check_structure(&bulletin.params, &structure)?;
            let secret = Secret::new(&bulletin.params, index, value)?;
            let next = add_secret(&hasher, &bulletin, &state.shares, &secret, &structure)?;
            state.secrets.push(secret);
            (next, index)
        }
        (None, Some(index)) => {
            let secret = state
                .secret(index)
                .cloned()
                .ok_or(Error::UnknownSecret(index))?;
            let structure = AccessStructure::new(index, sets);
            check_structure(&bulletin.params, &structure)?;
            let next =
                replace_access_structure(&hasher, &bulletin, &state.shares, &secret, &structure)?;
            (next, index)
        }
        _ => {
            return Err(validation(
                "give exactly one of --add-secret or --replace-structure",
            ))
        }
    };

    if state.shares != shares_before {
        return Err(validation("internal error: renewal modified a share"));
    }
    state.params = next.params.clone();
    store::save_bulletin(&next, &args.out)?;
    store::save_dealer_state(&state, &args.state)?;

    let diff = bulletin.diff(&next);
    print_dealer_hashes(
        out,
        hasher.counter().get(Role::Dealer),
        &next.structure(touched).into_iter().collect::<Vec<_>>(),
    );
    say!(out, "version {} -> {}", bulletin.version(), next.version());
    say!(
        out,
        "rows: added {}, removed {}, changed {}, unchanged {}",
        diff.added.len(),
        diff.removed.len(),
        diff.changed.len(),
        diff.unchanged.len()
    );
    say!(
        out,
        "retired verification entries: {}",
        diff.retired_entries.len()
    );
    say!(out, "shares unchanged: {}", state.shares.len());
    say!(out, "wrote {}", args.out.display());
    Ok(EXIT_OK)
}
