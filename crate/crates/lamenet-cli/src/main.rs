fn main() {
    std::process::exit(lamenet_cli::main_with_args(std::env::args_os(), std::env::vars()));
}
