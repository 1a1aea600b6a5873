fn main() {
    std::process::exit(oosketch::cli::main_with_args(std::env::args_os()));
}
