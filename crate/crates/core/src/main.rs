fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(pm_scaler::cli::run_cli(&args));
}
