//! Live trial monitoring: sessions, their event-log store, and the HTTP API.
//!
//! | method | path | body / query |
//! |---|---|---|
//! | POST | `/api/trials` | `{"s":7,"t":11,"prior":{"alpha":0.5,"beta":0.5}}` or `{"s":7,"t":11,"p":0.2}` |
//! | GET | `/api/trials/{id}` | |
//! | POST | `/api/trials/{id}/outcomes` | `{"response": true}` |
//! | POST | `/api/trials/{id}/undo` | |
//! | GET | `/api/trials/{id}/posterior` | |
//! | GET | `/api/snb/pmf` | `?p=0.2&s=7&t=11` |
//! | GET | `/api/snb/moments` | `?s=7&t=11&grid=0:1:0.01` |
//!
//! Errors are `{"code": ..., "message": ...}` with status 400, 404 or 409.

mod http;
mod session;
mod store;

pub use http::{router, serve, ApiError, ErrorBody};
pub use session::{
    DensityPoint, InterimReport, MixtureComponent, PmfPoint, PosteriorSummary, PosteriorView, RemainingLaw,
    ResponseModel, SessionError, TrialSession, TrialStatus, POSTERIOR_GRID,
};
pub use store::{log_header, new_trial_id, replay_log, TrialStore};

/// Port used when neither `--port` nor `SNB_PORT` is given.
pub const DEFAULT_PORT: u16 = 8080;
