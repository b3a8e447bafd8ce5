fn main() {
    std::process::exit(expanso_core::cli::main_with_args(std::env::args_os()));
}
