fn main() {
    std::process::exit(quatsub::cli::main_with_args(std::env::args_os()));
}
