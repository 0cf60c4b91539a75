fn main() {
    let seed = std::env::var("ONTIC_SEED").ok();
    let code = ontic_cli::run_with(
        std::env::args_os(),
        seed.as_deref(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    );
    std::process::exit(code);
}
