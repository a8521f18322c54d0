//! C ABI for relaycap.
//!
//! Channels live behind the opaque handle `RcChannel`, created by one of the
//! `rc_channel_*` constructors and released with `rc_channel_free`. Every
//! fallible call returns an `RcStatus`; on failure a description of the last
//! error on the calling thread is available from `rc_last_error_message`.
//! Panics never cross the boundary: they are caught and reported as
//! `RC_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use relaycap::capacity::{cf_optimal, cutset_rate, theorem1_search, Branch, OptimizerConfig, RatePoint};
use relaycap::channel::gaussian::{
    gaussian_capacity, gaussian_cf_r0, gaussian_cf_rstar, gaussian_invert_r0, GaussianRelaySpec,
};
use relaycap::channel::{ChannelFile, DiscreteRelayChannel};
use relaycap::codec::{simulate_haf, SimParams};
use relaycap::info::{entropy, Pmf, Typicality};
use relaycap::Error;

/// Status codes returned by every fallible function.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcStatus {
    Ok = 0,
    NullPointer = -1,
    InvalidArgument = -2,
    NotDeterministic = -3,
    NotConverged = -4,
    Parse = -5,
    Guard = -6,
    Unsupported = -7,
    Panic = -99,
}

/// Which cut-set term binds at the reported input.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcBranch {
    Link = 0,
    Broadcast = 1,
    Tie = 2,
}

/// Opaque relay channel handle.
pub struct RcChannel {
    inner: DiscreteRelayChannel,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RcOptimizerConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub restarts: usize,
    pub seed: u64,
}

/// One optimized rate. Fields without a value are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RcRatePoint {
    pub r0: f64,
    pub rate: f64,
    pub link_term: f64,
    pub broadcast_term: f64,
    pub upper_bound: f64,
    pub link_cost: f64,
    pub active_branch: RcBranch,
    pub iterations: usize,
    pub converged: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RcSimParams {
    pub n: usize,
    pub rate: f64,
    pub r0: f64,
    pub eps: f64,
    pub trials: usize,
    pub master_seed: u64,
    /// Weak (entropy-rate) typicality when false, per-cell strong typicality when true.
    pub strong_typicality: bool,
    pub fixed_codebook: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RcSimReport {
    pub trials: usize,
    pub errors: usize,
    pub err_a: usize,
    pub err_b: usize,
    pub err_c: usize,
    pub err_none: usize,
    pub pe_hat: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub mean_list_size: f64,
    pub num_words: usize,
    pub bin_bits: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(RcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::NotDeterministic { .. } => RcStatus::NotDeterministic,
            Error::NotConverged { .. } => RcStatus::NotConverged,
            Error::Parse(_) => RcStatus::Parse,
            Error::Guard(_) => RcStatus::Guard,
            Error::UnsupportedCorrelation(..) => RcStatus::Unsupported,
            _ => RcStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(RcStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RcStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            RcStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn channel<'a>(ch: *const RcChannel) -> Result<&'a DiscreteRelayChannel, Failure> {
    ch.as_ref().map(|c| &c.inner).ok_or_else(|| null("channel"))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn boxed(ch: DiscreteRelayChannel) -> *mut RcChannel {
    Box::into_raw(Box::new(RcChannel { inner: ch }))
}

fn config(cfg: *const RcOptimizerConfig) -> OptimizerConfig {
    match unsafe { cfg.as_ref() } {
        Some(c) => OptimizerConfig {
            tolerance: c.tolerance,
            max_iterations: c.max_iterations,
            restarts: c.restarts,
            seed: c.seed,
        },
        None => OptimizerConfig::default(),
    }
}

fn rate_point(p: &RatePoint) -> RcRatePoint {
    RcRatePoint {
        r0: p.r0,
        rate: p.rate,
        link_term: p.link_term,
        broadcast_term: p.broadcast_term,
        upper_bound: p.upper_bound.unwrap_or(f64::NAN),
        link_cost: p.link_cost.unwrap_or(f64::NAN),
        active_branch: match p.active_branch {
            Branch::Link => RcBranch::Link,
            Branch::Broadcast => RcBranch::Broadcast,
            Branch::Tie => RcBranch::Tie,
        },
        iterations: p.iterations,
        converged: p.converged,
    }
}

/// Copies the optimizing input into `px_out` when it is non-null.
unsafe fn write_input(p: &RatePoint, px_out: *mut f64, px_len: usize) -> Result<(), Failure> {
    if px_out.is_null() {
        return Ok(());
    }
    let probs = p.argmax_input.probs();
    if px_len != probs.len() {
        return Err(Failure(
            RcStatus::InvalidArgument,
            format!("px buffer holds {px_len} entries, input alphabet has {}", probs.len()),
        ));
    }
    ptr::copy_nonoverlapping(probs.as_ptr(), px_out, px_len);
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn rc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a channel from p(y, y1 | x) laid out as [x][y][y1].
///
/// # Safety
/// `transition` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_channel_new(
    size_x: usize,
    size_y: usize,
    size_y1: usize,
    transition: *const f64,
    len: usize,
    out: *mut *mut RcChannel,
) -> RcStatus {
    guard(|| {
        let t = slice(transition, len, "transition")?;
        let ch = DiscreteRelayChannel::new(size_x, size_y, size_y1, t.to_vec())?;
        write(out, boxed(ch), "out")
    })
}

/// Parses a channel from its JSON file format.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_channel_from_json(json: *const c_char, out: *mut *mut RcChannel) -> RcStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(RcStatus::Parse, format!("json is not UTF-8: {e}")))?;
        let file: ChannelFile = serde_json::from_str(text).map_err(Error::from)?;
        write(out, boxed(file.into_channel()?), "out")
    })
}

/// Binary channel Y = X xor S with S ~ Bernoulli(p) seen by the relay.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_channel_bsc_state(p: f64, out: *mut *mut RcChannel) -> RcStatus {
    guard(|| write(out, boxed(DiscreteRelayChannel::bsc_state(p)?), "out"))
}

/// Releases a channel; null is ignored.
///
/// # Safety
/// `ch` must come from an `rc_channel_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rc_channel_free(ch: *mut RcChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

/// Alphabet sizes |X|, |Y|, |Y1|.
///
/// # Safety
/// `ch` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_channel_sizes(
    ch: *const RcChannel,
    size_x: *mut usize,
    size_y: *mut usize,
    size_y1: *mut usize,
) -> RcStatus {
    guard(|| {
        let c = channel(ch)?;
        write(size_x, c.size_x(), "size_x")?;
        write(size_y, c.size_y(), "size_y")?;
        write(size_y1, c.size_y1(), "size_y1")
    })
}

/// Writes f(x, y) into `table[x * |Y| + y]`, or -1 where p(y|x) = 0.
/// Fails with `RC_STATUS_NOT_DETERMINISTIC` when no such f exists.
///
/// # Safety
/// `ch` must be a live handle; `table` must hold `len` writable ints.
#[no_mangle]
pub unsafe extern "C" fn rc_channel_relay_function(ch: *const RcChannel, table: *mut i32, len: usize) -> RcStatus {
    guard(|| {
        let c = channel(ch)?;
        let f = c.validate()?;
        if len != c.size_x() * c.size_y() {
            return Err(Failure(
                RcStatus::InvalidArgument,
                format!("table holds {len} entries, need {}", c.size_x() * c.size_y()),
            ));
        }
        if table.is_null() {
            return Err(null("table"));
        }
        for (x, y, y1) in f.table_rows() {
            table.add(x * c.size_y() + y).write(y1.map_or(-1, |v| v as i32));
        }
        Ok(())
    })
}

/// min{I(X;Y) + r0, I(X;Y,Y1)} at input `px`.
///
/// # Safety
/// `ch` must be a live handle; `px` must hold `px_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rc_cutset_rate(
    ch: *const RcChannel,
    px: *const f64,
    px_len: usize,
    r0: f64,
    out: *mut f64,
) -> RcStatus {
    guard(|| {
        let c = channel(ch)?;
        let px = Pmf::new(slice(px, px_len, "px")?.to_vec())?;
        write(out, cutset_rate(&px, c, r0)?, "out")
    })
}

/// Capacity max_p min{I(X;Y) + r0, I(X;Y,Y1)}. `cfg` may be null for
/// defaults, `px_out` may be null. The point is written even when the
/// certificate misses the tolerance, in which case the status is
/// `RC_STATUS_NOT_CONVERGED`.
///
/// # Safety
/// `ch` must be a live handle; `out` writable; `px_out`, if non-null, must
/// hold `px_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rc_theorem1_capacity(
    ch: *const RcChannel,
    r0: f64,
    cfg: *const RcOptimizerConfig,
    out: *mut RcRatePoint,
    px_out: *mut f64,
    px_len: usize,
) -> RcStatus {
    guard(|| {
        let c = channel(ch)?;
        let point = theorem1_search(c, r0, &config(cfg))?;
        write_input(&point, px_out, px_len)?;
        write(out, rate_point(&point), "out")?;
        if point.converged {
            Ok(())
        } else {
            Err(Failure(
                RcStatus::NotConverged,
                format!(
                    "certified gap {:.3e} exceeds the tolerance",
                    point.upper_bound.unwrap_or(f64::INFINITY) - point.rate
                ),
            ))
        }
    })
}

/// Best compress-and-forward rate under link budget `r0`. Arguments as for
/// `rc_theorem1_capacity`.
///
/// # Safety
/// As for `rc_theorem1_capacity`.
#[no_mangle]
pub unsafe extern "C" fn rc_cf_optimal(
    ch: *const RcChannel,
    r0: f64,
    cfg: *const RcOptimizerConfig,
    out: *mut RcRatePoint,
    px_out: *mut f64,
    px_len: usize,
) -> RcStatus {
    guard(|| {
        let c = channel(ch)?;
        let point = cf_optimal(c, r0, &config(cfg))?;
        write_input(&point, px_out, px_len)?;
        write(out, rate_point(&point), "out")
    })
}

/// Gaussian relay capacity for rho = +1 or -1.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_gaussian_capacity(power: f64, noise: f64, rho: f64, r0: f64, out: *mut f64) -> RcStatus {
    guard(|| {
        let spec = GaussianRelaySpec::new(power, noise, rho)?;
        write(out, gaussian_capacity(&spec, r0)?, "out")
    })
}

/// Point (R0(sigma2), R*(sigma2)) of the anticorrelated compress-and-forward curve.
///
/// # Safety
/// `r0_out` and `rstar_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_gaussian_cf_point(
    power: f64,
    noise: f64,
    sigma2: f64,
    r0_out: *mut f64,
    rstar_out: *mut f64,
) -> RcStatus {
    guard(|| {
        let spec = GaussianRelaySpec::new(power, noise, -1.0)?;
        write(r0_out, gaussian_cf_r0(&spec, sigma2)?, "r0_out")?;
        write(rstar_out, gaussian_cf_rstar(&spec, sigma2)?, "rstar_out")
    })
}

/// Description noise variance whose link rate is `r0` (anticorrelated case).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_gaussian_invert_r0(power: f64, noise: f64, r0: f64, out: *mut f64) -> RcStatus {
    guard(|| {
        let spec = GaussianRelaySpec::new(power, noise, -1.0)?;
        write(out, gaussian_invert_r0(&spec, r0)?, "out")
    })
}

/// Monte Carlo error rate of hash-and-forward. `px` may be null for the
/// uniform input.
///
/// # Safety
/// `ch` must be a live handle; `params` readable; `out` writable; `px`, if
/// non-null, must hold `px_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rc_simulate_haf(
    ch: *const RcChannel,
    px: *const f64,
    px_len: usize,
    params: *const RcSimParams,
    out: *mut RcSimReport,
) -> RcStatus {
    guard(|| {
        let c = channel(ch)?;
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        let px = if px.is_null() {
            Pmf::uniform(c.size_x())
        } else {
            Pmf::new(slice(px, px_len, "px")?.to_vec())?
        };
        let sim = SimParams {
            n: p.n,
            rate: p.rate,
            r0: p.r0,
            eps: p.eps,
            trials: p.trials,
            master_seed: p.master_seed,
            typicality: if p.strong_typicality {
                Typicality::Strong
            } else {
                Typicality::Weak
            },
            fixed_codebook: p.fixed_codebook,
        };
        let r = simulate_haf(c, &px, &sim)?;
        write(
            out,
            RcSimReport {
                trials: r.trials,
                errors: r.errors,
                err_a: r.err_a,
                err_b: r.err_b,
                err_c: r.err_c,
                err_none: r.err_none,
                pe_hat: r.pe_hat,
                wilson_low: r.wilson95[0],
                wilson_high: r.wilson95[1],
                mean_list_size: r.mean_list_size,
                num_words: r.params.num_words,
                bin_bits: r.params.bin_bits,
            },
            "out",
        )
    })
}

/// Entropy in bits of a probability vector.
///
/// # Safety
/// `p` must hold `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_entropy(p: *const f64, len: usize, out: *mut f64) -> RcStatus {
    guard(|| {
        let pmf = Pmf::new(slice(p, len, "p")?.to_vec())?;
        write(out, entropy(&pmf), "out")
    })
}
