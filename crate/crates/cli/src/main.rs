fn main() {
    if let Err(e) = fairtile_cli::configure_threads() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
    std::process::exit(fairtile_cli::run(std::env::args_os()));
}
