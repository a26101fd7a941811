fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(ns1d_core::cli::run_cli(argv));
}
