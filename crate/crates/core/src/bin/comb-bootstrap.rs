fn main() {
    std::process::exit(comb_bootstrap::cli::run(std::env::args_os()));
}
