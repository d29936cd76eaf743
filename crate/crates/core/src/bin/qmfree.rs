use std::io::Write;

fn main() {
    if let Some(n) = std::env::var("QMFREE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // ignore failure: the pool can only be configured once
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let out = qmfree::cli::run(std::env::args_os());
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    std::process::exit(out.code);
}
