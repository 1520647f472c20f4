fn main() {
    std::process::exit(centering::cli::main_with_args(std::env::args_os()));
}
