//! C interface to `pathperc`.
//!
//! Every function returns a [`PpStatus`]. On failure a message is kept per
//! thread and can be copied out with [`pp_last_error_message`]. Simulations
//! are opaque handles created by [`pp_simulation_new`] and released by
//! [`pp_simulation_free`]. No function unwinds across the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use pathperc::dynamics::{RejectPolicy, Scheme, SteadyRun};
use pathperc::graph::{DiskParams, GeneratorKind, GeneratorSpec};
use pathperc::observables::availability_from_sizes;
use pathperc::rng::seeded;
use pathperc::smoluchowski::{critical_alpha_closed_form, solve_steady_state, Equation, KernelMode, SolverConfig};
use pathperc::{Error, Simulation};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotConverged = 3,
    BufferTooSmall = 4,
    Panic = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpTopology {
    Ust = 0,
    Er = 1,
    Honeycomb = 2,
    Complete = 3,
    Satellite = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpScheme {
    CrossLinking = 0,
    Downlink = 1,
    Redundancy = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpKernel {
    AsymptoticHalf = 0,
    PerParent = 1,
    ExactUst = 2,
}

/// One simulation step as seen from C.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PpStepRecord {
    pub step: u64,
    pub removed_path_length: u64,
    pub links_added: u64,
    pub n_components: u64,
    pub s_max: u64,
    pub eta: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PpMomentReport {
    pub tau: f64,
    pub s_max: u64,
    pub k_exact: f64,
    pub k_asym: f64,
    pub alpha_star_exact: f64,
    pub alpha_star_asym: f64,
    pub alpha_star_balance: f64,
}

/// Opaque simulation handle.
pub struct PpSimulation {
    inner: Simulation,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: PpStatus, msg: impl Into<String>) -> PpStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> PpStatus {
    let status = match e {
        Error::InvalidArgument(_)
        | Error::NodeOutOfRange { .. }
        | Error::Parse { .. }
        | Error::Empty(_)
        | Error::SelfLoop(_)
        | Error::DuplicateEdge(..)
        | Error::MissingEdge(..)
        | Error::Disconnected(..) => PpStatus::InvalidArgument,
        Error::Bracket(_) => PpStatus::NotConverged,
        Error::Io(_) => PpStatus::Internal,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> PpStatus) -> PpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == PpStatus::Ok {
                set_error("");
            }
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(PpStatus::Panic, format!("panic: {msg}"))
        }
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(PpStatus::NullPointer, concat!("null pointer: ", stringify!($p)));
        })+
    };
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pp_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len - 1` bytes) and returns the full message
/// length in bytes. Empty after a successful call.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn pp_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Creates a simulation on a freshly generated topology. `mean_degree` is
/// read only for ER topologies. Downlink uses the default ground disk and
/// resamples failed transmissions when `resample_rejects` is nonzero.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn pp_simulation_new(
    topology: PpTopology,
    n: usize,
    mean_degree: f64,
    scheme: PpScheme,
    alpha: f64,
    resample_rejects: i32,
    seed: u64,
    out: *mut *mut PpSimulation,
) -> PpStatus {
    guard(|| {
        non_null!(out);
        let kind = match topology {
            PpTopology::Ust => GeneratorKind::Ust,
            PpTopology::Er => GeneratorKind::Er,
            PpTopology::Honeycomb => GeneratorKind::Honeycomb,
            PpTopology::Complete => GeneratorKind::Complete,
            PpTopology::Satellite => GeneratorKind::Satellite,
        };
        let mut spec = GeneratorSpec::new(kind, n);
        if kind == GeneratorKind::Er {
            spec.mean_degree = Some(mean_degree);
        }
        let mut run = SteadyRun::cross_linking(spec, alpha);
        run.scheme = match scheme {
            PpScheme::CrossLinking => Scheme::CrossLinking,
            PpScheme::Downlink => Scheme::Downlink,
            PpScheme::Redundancy => Scheme::Redundancy,
        };
        run.disk = DiskParams::default();
        run.on_reject = if resample_rejects != 0 { RejectPolicy::Resample } else { RejectPolicy::Consume };
        let mut rng = seeded(seed);
        let built = run.prepare(&mut rng).and_then(|(net, cfg)| Simulation::new(net, cfg, rng));
        match built {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(PpSimulation { inner }));
                PpStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a handle from [`pp_simulation_new`]. Null is ignored.
///
/// # Safety
/// `sim` must be null or a live handle not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pp_simulation_free(sim: *mut PpSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advances `steps` steps and stores the last step's record in `last`
/// (which may be null).
///
/// # Safety
/// `sim` must be a live handle; `last` null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn pp_simulation_step(sim: *mut PpSimulation, steps: u64, last: *mut PpStepRecord) -> PpStatus {
    guard(|| {
        non_null!(sim);
        let sim = &mut (*sim).inner;
        let mut rec = None;
        for _ in 0..steps {
            rec = Some(sim.step());
        }
        if let (Some(r), false) = (rec, last.is_null()) {
            *last = PpStepRecord {
                step: r.step,
                removed_path_length: r.removed_path_length as u64,
                links_added: r.links_added as u64,
                n_components: r.n_components as u64,
                s_max: r.s_max as u64,
                eta: r.eta,
            };
        }
        PpStatus::Ok
    })
}

/// Current availability of the simulated network.
///
/// # Safety
/// `sim` must be a live handle; `eta` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn pp_simulation_availability(sim: *const PpSimulation, eta: *mut f64) -> PpStatus {
    guard(|| {
        non_null!(sim, eta);
        *eta = pathperc::availability((*sim).inner.network());
        PpStatus::Ok
    })
}

/// Writes the component sizes (in no particular order) into `buf` and the
/// component count into `count`. Returns `BufferTooSmall`, with `count`
/// still set, when `len` is short.
///
/// # Safety
/// `sim` must be a live handle; `buf` valid for `len` writes; `count` for one.
#[no_mangle]
pub unsafe extern "C" fn pp_simulation_component_sizes(
    sim: *const PpSimulation,
    buf: *mut u64,
    len: usize,
    count: *mut usize,
) -> PpStatus {
    guard(|| {
        non_null!(sim, count);
        let sizes = (*sim).inner.network().component_sizes();
        *count = sizes.len();
        if sizes.len() > len {
            return fail(PpStatus::BufferTooSmall, format!("need room for {} sizes", sizes.len()));
        }
        non_null!(buf);
        for (i, s) in sizes.into_iter().enumerate() {
            *buf.add(i) = s as u64;
        }
        PpStatus::Ok
    })
}

/// Availability of a partition given by its block sizes.
///
/// # Safety
/// `sizes` must be valid for `len` reads; `eta` for one write.
#[no_mangle]
pub unsafe extern "C" fn pp_availability_from_sizes(sizes: *const u64, len: usize, eta: *mut f64) -> PpStatus {
    guard(|| {
        non_null!(sizes, eta);
        let sizes: Vec<usize> = std::slice::from_raw_parts(sizes, len).iter().map(|&s| s as usize).collect();
        if sizes.iter().sum::<usize>() < 2 {
            return fail(PpStatus::InvalidArgument, "partition needs at least two nodes");
        }
        *eta = availability_from_sizes(&sizes);
        PpStatus::Ok
    })
}

/// Steady state of the rate equation. `v` receives `v(1)..v(s_max)` and must
/// hold `s_max` values. `full_equation` selects the full rather than the
/// approximate equation. The solution is written even when it did not
/// converge, in which case `NotConverged` is returned.
///
/// # Safety
/// `v` must be valid for `len` writes; `residual` null or valid for one.
#[no_mangle]
pub unsafe extern "C" fn pp_solve_steady_state(
    alpha: f64,
    s_max: usize,
    kernel: PpKernel,
    full_equation: i32,
    v: *mut f64,
    len: usize,
    residual: *mut f64,
) -> PpStatus {
    guard(|| {
        non_null!(v);
        if len < s_max {
            return fail(PpStatus::BufferTooSmall, format!("need room for {s_max} values"));
        }
        let mut cfg = SolverConfig::new(alpha, s_max);
        cfg.kernel = match kernel {
            PpKernel::AsymptoticHalf => KernelMode::AsymptoticHalf,
            PpKernel::PerParent => KernelMode::PerParentNormalized,
            PpKernel::ExactUst => KernelMode::ExactUst,
        };
        cfg.equation = if full_equation != 0 { Equation::Full } else { Equation::Approximate };
        let state = match solve_steady_state(&cfg) {
            Ok(s) => s,
            Err(e) => return from_error(e),
        };
        std::ptr::copy_nonoverlapping(state.v[1..=s_max].as_ptr(), v, s_max);
        if !residual.is_null() {
            *residual = state.residual;
        }
        if state.converged {
            PpStatus::Ok
        } else {
            fail(PpStatus::NotConverged, format!("residual {} after {} iterations", state.residual, state.iterations))
        }
    })
}

/// Closed-form threshold estimates for power-law exponent `tau`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn pp_critical_alpha(tau: f64, s_max: u64, out: *mut PpMomentReport) -> PpStatus {
    guard(|| {
        non_null!(out);
        match critical_alpha_closed_form(tau, s_max) {
            Ok(r) => {
                *out = PpMomentReport {
                    tau: r.tau,
                    s_max: r.s_max,
                    k_exact: r.k_exact,
                    k_asym: r.k_asym,
                    alpha_star_exact: r.alpha_star_exact,
                    alpha_star_asym: r.alpha_star_asym,
                    alpha_star_balance: r.alpha_star_balance,
                };
                PpStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
