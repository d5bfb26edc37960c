fn main() {
    std::process::exit(mmpr_cli::run_from_args(std::env::args_os()));
}
