//! Session registry with an optional append-only event log per session.
//!
//! Log layout (`<id>.log`, plain text):
//!
//! ```text
//! # snb trial log v1
//! id Zq3...
//! created_at 1760500000
//! design 7 11
//! model beta 0.5 0.5
//! 1
//! 0
//! undo
//! ```
//!
//! Every line after the header is one event; replaying them in order
//! reconstructs the session.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine as _;
use rand::RngCore;

use super::session::{InterimReport, PosteriorView, ResponseModel, SessionError, TrialSession};

const LOG_MAGIC: &str = "# snb trial log v1";

/// 128-bit random token, URL-safe base64 without padding.
pub fn new_trial_id() -> String {
    let mut bytes = [0u8; 16];
    rand::rng().fill_bytes(&mut bytes);
    URL_SAFE_NO_PAD.encode(bytes)
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
}

pub fn log_header(session: &TrialSession) -> String {
    let (s, t) = session.design();
    let model = match session.model() {
        ResponseModel::Fixed { p } => format!("model fixed {p:?}"),
        ResponseModel::Beta { alpha, beta } => format!("model beta {alpha:?} {beta:?}"),
    };
    format!(
        "{LOG_MAGIC}\nid {}\ncreated_at {}\ndesign {s} {t}\n{model}\n",
        session.id(),
        session.created_at()
    )
}

/// Rebuilds a session by folding its event log.
pub fn replay_log(text: &str) -> Result<TrialSession, SessionError> {
    let corrupt = |line: usize, why: &str| SessionError::Storage(format!("line {line}: {why}"));
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, LOG_MAGIC)) => {}
        _ => return Err(corrupt(1, "missing log header")),
    }
    let mut field = |name: &str| -> Result<(usize, Vec<String>), SessionError> {
        let (n, line) = lines.next().ok_or_else(|| corrupt(0, "truncated header"))?;
        let mut words = line.split_whitespace();
        if words.next() != Some(name) {
            return Err(corrupt(n, &format!("expected `{name}`")));
        }
        Ok((n, words.map(str::to_string).collect()))
    };
    let (n, id) = field("id")?;
    let id = id.first().filter(|v| valid_id(v)).cloned().ok_or_else(|| corrupt(n, "bad id"))?;
    let (n, created) = field("created_at")?;
    let created_at = created.first().and_then(|v| v.parse().ok()).ok_or_else(|| corrupt(n, "bad timestamp"))?;
    let (n, design) = field("design")?;
    let nums: Vec<u64> = design.iter().filter_map(|v| v.parse().ok()).collect();
    if nums.len() != 2 || design.len() != 2 {
        return Err(corrupt(n, "bad design"));
    }
    let (n, model) = field("model")?;
    let reals: Vec<f64> = model.iter().skip(1).filter_map(|v| v.parse().ok()).collect();
    let model = match (model.first().map(String::as_str), reals.as_slice()) {
        (Some("fixed"), [p]) if model.len() == 2 => ResponseModel::Fixed { p: *p },
        (Some("beta"), [a, b]) if model.len() == 3 => ResponseModel::Beta { alpha: *a, beta: *b },
        _ => return Err(corrupt(n, "bad model")),
    };
    let mut session = TrialSession::new(id, created_at, nums[0], nums[1], model)?;
    for (n, line) in lines {
        match line {
            "" => {}
            "1" => session.record(true).map_err(|e| corrupt(n, &e.to_string()))?,
            "0" => session.record(false).map_err(|e| corrupt(n, &e.to_string()))?,
            "undo" => {
                session.undo().map_err(|e| corrupt(n, &e.to_string()))?;
            }
            other => return Err(corrupt(n, &format!("unknown event {other:?}"))),
        }
    }
    Ok(session)
}

/// Thread-safe registry of live sessions.
///
/// The map lock is held only to look up or insert a session; each session
/// has its own mutex, so work on distinct trials proceeds in parallel.
#[derive(Debug, Default)]
pub struct TrialStore {
    sessions: RwLock<HashMap<String, Arc<Mutex<TrialSession>>>>,
    log_dir: Option<PathBuf>,
}

fn storage_err(e: std::io::Error) -> SessionError {
    SessionError::Storage(e.to_string())
}

impl TrialStore {
    pub fn in_memory() -> Self {
        TrialStore::default()
    }

    /// Opens (creating if needed) a log directory and replays every
    /// `*.log` file in it.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, SessionError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir).map_err(storage_err)?;
        let mut sessions = HashMap::new();
        for entry in fs::read_dir(&dir).map_err(storage_err)? {
            let path = entry.map_err(storage_err)?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("log") {
                continue;
            }
            let text = fs::read_to_string(&path).map_err(storage_err)?;
            let session = replay_log(&text)
                .map_err(|e| SessionError::Storage(format!("{}: {e}", path.display())))?;
            sessions.insert(session.id().to_string(), Arc::new(Mutex::new(session)));
        }
        Ok(TrialStore { sessions: RwLock::new(sessions), log_dir: Some(dir) })
    }

    pub fn log_dir(&self) -> Option<&Path> {
        self.log_dir.as_deref()
    }

    fn log_path(&self, id: &str) -> Option<PathBuf> {
        self.log_dir.as_ref().map(|d| d.join(format!("{id}.log")))
    }

    fn append(&self, id: &str, event: &str) -> Result<(), SessionError> {
        if let Some(path) = self.log_path(id) {
            let mut f = OpenOptions::new().append(true).open(path).map_err(storage_err)?;
            writeln!(f, "{event}").map_err(storage_err)?;
        }
        Ok(())
    }

    fn get(&self, id: &str) -> Result<Arc<Mutex<TrialSession>>, SessionError> {
        let map = self.sessions.read().expect("session map poisoned");
        map.get(id).cloned().ok_or_else(|| SessionError::NotFound { id: id.to_string() })
    }

    pub fn ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.sessions.read().expect("session map poisoned").keys().cloned().collect();
        ids.sort();
        ids
    }

    pub fn create(&self, s: u64, t: u64, model: ResponseModel) -> Result<InterimReport, SessionError> {
        let created_at = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let mut map = self.sessions.write().expect("session map poisoned");
        let mut id = new_trial_id();
        while map.contains_key(&id) {
            id = new_trial_id();
        }
        let session = TrialSession::new(id.clone(), created_at, s, t, model)?;
        let report = session.report()?;
        if let Some(path) = self.log_path(&id) {
            let mut f = File::create(path).map_err(storage_err)?;
            f.write_all(log_header(&session).as_bytes()).map_err(storage_err)?;
        }
        map.insert(id, Arc::new(Mutex::new(session)));
        Ok(report)
    }

    pub fn record(&self, id: &str, response: bool) -> Result<InterimReport, SessionError> {
        let handle = self.get(id)?;
        let mut session = handle.lock().expect("session poisoned");
        session.record(response)?;
        if let Err(e) = self.append(id, if response { "1" } else { "0" }) {
            session.undo()?;
            return Err(e);
        }
        session.report()
    }

    pub fn undo(&self, id: &str) -> Result<InterimReport, SessionError> {
        let handle = self.get(id)?;
        let mut session = handle.lock().expect("session poisoned");
        let removed = session.undo()?;
        if let Err(e) = self.append(id, "undo") {
            session.record(removed)?;
            return Err(e);
        }
        session.report()
    }

    pub fn state(&self, id: &str) -> Result<InterimReport, SessionError> {
        let handle = self.get(id)?;
        let session = handle.lock().expect("session poisoned");
        session.report()
    }

    pub fn posterior(&self, id: &str) -> Result<PosteriorView, SessionError> {
        let handle = self.get(id)?;
        let session = handle.lock().expect("session poisoned");
        Ok(session.posterior_view())
    }

    /// Snapshot of one session, for inspection and tests.
    pub fn session(&self, id: &str) -> Result<TrialSession, SessionError> {
        Ok(self.get(id)?.lock().expect("session poisoned").clone())
    }
}
