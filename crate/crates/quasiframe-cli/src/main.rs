fn main() {
    std::process::exit(quasiframe_cli::run_from_args(std::env::args().skip(1)));
}
