fn main() {
    std::process::exit(rumor_lab::cli::main_with_args(std::env::args_os()));
}
