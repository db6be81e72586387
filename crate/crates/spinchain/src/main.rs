use std::process::ExitCode;

fn main() -> ExitCode {
    // Single-threaded BLAS keeps results identical across machines and
    // worker counts; parallelism comes from the grid-point pool.
    std::env::set_var("OPENBLAS_NUM_THREADS", "1");
    ExitCode::from(spinchain::cli::run(std::env::args_os()) as u8)
}
