fn main() {
    std::process::exit(savbcfd::cli::main_with(std::env::args_os()));
}
