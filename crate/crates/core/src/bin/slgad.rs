fn main() {
    std::process::exit(slgad::cli::main_with_args(std::env::args_os()));
}
