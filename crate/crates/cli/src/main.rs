fn main() {
    std::process::exit(hazdep_cli::main_with_args(std::env::args_os()));
}
