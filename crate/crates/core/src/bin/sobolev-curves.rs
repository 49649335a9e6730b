fn main() {
    std::process::exit(sobolev_curves::cli::main_with_args(std::env::args_os()));
}
