//! C ABI for the kacward library.
//!
//! Graphs are held behind the opaque handle [`KwGraph`]. Every function
//! returns a [`KwStatus`]; on failure a human-readable message is stored in
//! thread-local storage and can be read with [`kw_last_error_message`].
//! Strings returned through out-parameters are allocated by this library and
//! must be released with [`kw_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use kacward::builtins;
use kacward::critical;
use kacward::error::Error;
use kacward::fan_wu;
use kacward::free_energy;
use kacward::kac_ward;
use kacward::toric_graph::{parse_graph, CouplingSpec, GraphData, ToricGraph};
use kacward::weights::WeightSystem;
use num_complex::Complex64;

/// Result code of every C API call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KwStatus {
    Ok = 0,
    /// The graph file or an argument string did not parse.
    ParseError = 1,
    /// The graph violates an embedding invariant.
    InvalidGraph = 2,
    /// A numeric routine rejected its input or failed to converge.
    ComputeError = 3,
    /// The request exceeds a desk-scale enumeration cap.
    TooLarge = 4,
    /// A required pointer argument was null.
    NullArgument = 5,
}

/// Opaque handle to a validated toric graph.
pub struct KwGraph {
    inner: ToricGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = sanitized);
}

fn status_of(e: &Error) -> KwStatus {
    match e {
        Error::Parse { .. } | Error::UnknownExample(_) => KwStatus::ParseError,
        Error::ZeroLengthEdge(_)
        | Error::Disconnected
        | Error::DegenerateEmbedding(_)
        | Error::InvalidWeight(_) => KwStatus::InvalidGraph,
        Error::TooLarge(_) => KwStatus::TooLarge,
        _ => KwStatus::ComputeError,
    }
}

fn fail(e: Error) -> KwStatus {
    set_error(&e.to_string());
    status_of(&e)
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn kw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, KwStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(KwStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        KwStatus::ParseError
    })
}

unsafe fn graph_ref<'a>(g: *const KwGraph) -> Result<&'a ToricGraph, KwStatus> {
    if g.is_null() {
        set_error("null graph handle");
        return Err(KwStatus::NullArgument);
    }
    Ok(&(*g).inner)
}

fn emit_handle(g: ToricGraph, out: *mut *mut KwGraph) -> KwStatus {
    if out.is_null() {
        set_error("null output pointer");
        return KwStatus::NullArgument;
    }
    unsafe {
        *out = Box::into_raw(Box::new(KwGraph { inner: g }));
    }
    KwStatus::Ok
}

fn emit_string(text: String, out: *mut *mut c_char) -> KwStatus {
    if out.is_null() {
        set_error("null output pointer");
        return KwStatus::NullArgument;
    }
    match CString::new(text) {
        Ok(s) => {
            unsafe {
                *out = s.into_raw();
            }
            KwStatus::Ok
        }
        Err(_) => {
            set_error("emitted text contained an interior NUL");
            KwStatus::ComputeError
        }
    }
}

/// Parses a graph file held in a UTF-8 string and validates the embedding.
///
/// # Safety
/// `text` must point to a NUL-terminated string; `out` must be a valid
/// pointer. The returned handle must be released with [`kw_graph_free`].
#[no_mangle]
pub unsafe extern "C" fn kw_graph_parse(text: *const c_char, out: *mut *mut KwGraph) -> KwStatus {
    let text = match read_str(text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match parse_graph(text).and_then(GraphData::build) {
        Ok(g) => emit_handle(g, out),
        Err(e) => fail(e),
    }
}

/// Loads a built-in example graph: square, hex, tri, rect21 or rect-iso.
///
/// # Safety
/// `name` must point to a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn kw_graph_builtin(name: *const c_char, out: *mut *mut KwGraph) -> KwStatus {
    let name = match read_str(name) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match builtins::builtin(name) {
        Ok(g) => emit_handle(g, out),
        Err(e) => fail(e),
    }
}

/// Releases a graph handle. Null is ignored.
///
/// # Safety
/// `g` must be a handle returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kw_graph_free(g: *mut KwGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Reports the vertex, edge and face counts of the fundamental domain.
///
/// # Safety
/// `g` must be a live handle; out-pointers may be null to skip a field.
#[no_mangle]
pub unsafe extern "C" fn kw_graph_counts(
    g: *const KwGraph,
    vertices: *mut usize,
    edges: *mut usize,
    faces: *mut usize,
) -> KwStatus {
    let graph = match graph_ref(g) {
        Ok(r) => r,
        Err(s) => return s,
    };
    if !vertices.is_null() {
        *vertices = graph.vertex_count();
    }
    if !edges.is_null() {
        *edges = graph.edge_count();
    }
    if !faces.is_null() {
        *faces = graph.face_count();
    }
    KwStatus::Ok
}

/// Serializes the graph back to its file format.
///
/// # Safety
/// `g` must be a live handle; `out` must be valid. Free the string with
/// [`kw_string_free`].
#[no_mangle]
pub unsafe extern "C" fn kw_graph_emit(g: *const KwGraph, out: *mut *mut c_char) -> KwStatus {
    let graph = match graph_ref(g) {
        Ok(r) => r,
        Err(s) => return s,
    };
    emit_string(graph.to_file_string(), out)
}

/// Solves for the critical inverse temperature with the stored couplings.
///
/// # Safety
/// `g` must be a live handle; `beta_c` must be valid; `residual` may be null.
#[no_mangle]
pub unsafe extern "C" fn kw_critical_beta(
    g: *const KwGraph,
    tol: f64,
    beta_c: *mut f64,
    residual: *mut f64,
) -> KwStatus {
    let graph = match graph_ref(g) {
        Ok(r) => r,
        Err(s) => return s,
    };
    if beta_c.is_null() {
        set_error("null output pointer");
        return KwStatus::NullArgument;
    }
    match critical::critical_beta(graph, &graph.couplings(), tol) {
        Ok(point) => {
            *beta_c = point.beta_c;
            if !residual.is_null() {
                *residual = point.residual;
            }
            KwStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// `Z_{E0} - Z_{E1}` at the given inverse temperature: positive means
/// disordered, negative means ordered.
///
/// # Safety
/// `g` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn kw_phase_indicator(
    g: *const KwGraph,
    beta: f64,
    out: *mut f64,
) -> KwStatus {
    let graph = match graph_ref(g) {
        Ok(r) => r,
        Err(s) => return s,
    };
    if out.is_null() {
        set_error("null output pointer");
        return KwStatus::NullArgument;
    }
    match critical::phase_indicator(graph, &graph.couplings(), beta) {
        Ok(v) => {
            *out = v;
            KwStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Ising free energy per fundamental domain at inverse temperature `beta`,
/// by toroidal quadrature on a `grid_n x grid_n` midpoint grid (power of two,
/// at least 8).
///
/// # Safety
/// `g` must be a live handle; `value` must be valid; `error_estimate` may be
/// null.
#[no_mangle]
pub unsafe extern "C" fn kw_free_energy(
    g: *const KwGraph,
    beta: f64,
    grid_n: usize,
    value: *mut f64,
    error_estimate: *mut f64,
) -> KwStatus {
    let graph = match graph_ref(g) {
        Ok(r) => r,
        Err(s) => return s,
    };
    if value.is_null() {
        set_error("null output pointer");
        return KwStatus::NullArgument;
    }
    if grid_n < 8 || !grid_n.is_power_of_two() {
        set_error("grid size must be a power of two, at least 8");
        return KwStatus::ComputeError;
    }
    match free_energy::free_energy_ising(graph, &graph.couplings(), beta, grid_n) {
        Ok(r) => {
            *value = r.value;
            if !error_estimate.is_null() {
                *error_estimate = r.error_estimate;
            }
            KwStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Kac-Ward determinant at the unit phase point
/// `(z, w) = (exp(i*theta), exp(i*eta))` with `x = tanh(beta * J)`.
///
/// # Safety
/// `g` must be a live handle; `re` must be valid; `im` may be null.
#[no_mangle]
pub unsafe extern "C" fn kw_spectral_value(
    g: *const KwGraph,
    beta: f64,
    theta: f64,
    eta: f64,
    re: *mut f64,
    im: *mut f64,
) -> KwStatus {
    let graph = match graph_ref(g) {
        Ok(r) => r,
        Err(s) => return s,
    };
    if re.is_null() {
        set_error("null output pointer");
        return KwStatus::NullArgument;
    }
    let x = WeightSystem::from_beta(graph, beta);
    let p = kac_ward::determinant(
        graph,
        &x,
        Complex64::from_polar(1.0, theta),
        Complex64::from_polar(1.0, eta),
    );
    *re = p.value.re;
    if !im.is_null() {
        *im = p.value.im;
    }
    KwStatus::Ok
}

/// Emits the dual graph with Kramers-Wannier dual weights, fixing
/// `x = tanh(beta * J)` first.
///
/// # Safety
/// `g` must be a live handle; `out` must be valid. Free the string with
/// [`kw_string_free`].
#[no_mangle]
pub unsafe extern "C" fn kw_dualize(
    g: *const KwGraph,
    beta: f64,
    out: *mut *mut c_char,
) -> KwStatus {
    let graph = match graph_ref(g) {
        Ok(r) => r,
        Err(s) => return s,
    };
    let dual = match graph.dual() {
        Ok(d) => d,
        Err(e) => return fail(e),
    };
    let x = WeightSystem::from_beta(graph, beta);
    let xd = fan_wu::dual_weights(&x);
    let mut data = GraphData {
        basis: dual.basis(),
        vertices: dual.vertices().to_vec(),
        edges: dual.edges().to_vec(),
    };
    for (i, e) in data.edges.iter_mut().enumerate() {
        e.weight = CouplingSpec::X(xd.x(i));
    }
    emit_string(data.to_file_string(), out)
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must have been returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
