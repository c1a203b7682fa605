fn main() {
    std::process::exit(infomarket::cli::main_with_args(std::env::args_os()));
}
