fn main() {
    std::process::exit(hextremal::cli::main_with_args(std::env::args_os()));
}
