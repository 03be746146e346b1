fn main() {
    std::process::exit(kappa::cli::run(std::env::args_os()));
}
