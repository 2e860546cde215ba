fn main() {
    std::process::exit(grover_noise_cli::main_with_args(std::env::args_os()));
}
